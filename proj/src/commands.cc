// Copyright 2026 The BeamFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "beamfusion/commands.h"

#include <omp.h>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beamfusion/beamformer.h"
#include "beamfusion/dataset.h"
#include "beamfusion/fusion.h"
#include "beamfusion/metrics.h"
#include "beamfusion/pipeline.h"
#include "beamfusion/roomsim.h"
#include "beamfusion/speech_synth.h"
#include "beamfusion/tensor_file.h"
#include "beamfusion/wav.h"

namespace beamfusion {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Tracks what a command writes so a failed run leaves nothing behind.
class OutputGuard {
 public:
  OutputGuard() = default;
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    for (auto it = paths_.rbegin(); it != paths_.rend(); ++it) {
      std::error_code ec;
      fs::remove_all(*it, ec);
    }
  }

  // A file this command is about to write.
  void File(const fs::path& p) { paths_.push_back(p); }
  // A directory; removed on failure only if this command creates it.
  void Dir(const fs::path& p) {
    if (!fs::exists(p)) paths_.push_back(p);
  }
  void Commit() { committed_ = true; }

 private:
  std::vector<fs::path> paths_;
  bool committed_ = false;
};

std::uint64_t ParseSeed(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(std::string("invalid ") + what + " '" + text + "'");
  }
  return v;
}

// --seed wins, then BEAMFUSION_SEED, then 0.
struct SeedFlag {
  std::string value;
  CLI::Option* option = nullptr;

  void Add(CLI::App* cmd) {
    option = cmd->add_option("--seed", value, "64-bit seed (fallback: $BEAMFUSION_SEED, then 0)");
  }
  bool given() const { return option->count() > 0 || std::getenv("BEAMFUSION_SEED") != nullptr; }
  std::uint64_t Resolve() const {
    if (option->count() > 0) return ParseSeed(value, "--seed");
    if (const char* env = std::getenv("BEAMFUSION_SEED")) return ParseSeed(env, "BEAMFUSION_SEED");
    return 0;
  }
};

// Array/filter-bank flags shared by the commands that need a bank: either
// --filters <file.bfb> or the design parameters.
struct BankFlags {
  int mics = 8;
  double spacing = 0.01;
  double fs = 16000.0;
  int nfft = 512;
  double theta_s = 0.0;
  std::vector<double> nulls{90.0, 120.0, 150.0, 180.0};
  bool include_mwng = false;
  std::string filters;

  void AddDesign(CLI::App* cmd) {
    cmd->add_option("--mics", mics, "Number of microphones")->capture_default_str();
    cmd->add_option("--spacing", spacing, "Microphone spacing, meters")->capture_default_str();
    cmd->add_option("--fs", fs, "Sample rate, Hz")->capture_default_str();
    cmd->add_option("--nfft", nfft, "FFT size (window = nfft, hop = nfft / 4)")->capture_default_str();
    cmd->add_option("--theta-s", theta_s, "Look direction, degrees")->capture_default_str();
    cmd->add_option("--nulls", nulls, "Null directions in degrees, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_flag("--include-mwng", include_mwng, "Put the MWNG beamformer first in the bank");
  }
  void Add(CLI::App* cmd) {
    AddDesign(cmd);
    cmd->add_option("--filters", filters, "Filter-bank file; overrides the design flags");
  }

  ArrayGeometry Geometry() const {
    ArrayGeometry g;
    g.num_mics = mics;
    g.spacing = spacing;
    g.sample_rate = fs;
    g.Validate();
    return g;
  }

  FilterBank Bank() const {
    if (!filters.empty()) return LoadFilterBank(filters);
    std::vector<double> rad;
    for (double d : nulls) rad.push_back(DegToRad(d));
    FrequencyGrid grid{nfft, fs};
    grid.Validate();
    return DesignDmaBank(Geometry(), grid, DegToRad(theta_s), rad, include_mwng);
  }
};

StftConfig StftFor(int nfft) {
  StftConfig cfg;
  cfg.nfft = nfft;
  cfg.window_len = nfft;
  cfg.hop = nfft / 4;
  cfg.Validate();
  return cfg;
}

std::vector<Mode> ParseModes(const std::vector<std::string>& texts) {
  std::vector<Mode> modes;
  for (const auto& t : texts) modes.push_back(Mode::Parse(t));
  if (modes.empty()) throw Error("no modes given");
  return modes;
}

void WriteText(OutputGuard& guard, const std::string& path, const std::string& text,
               std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  guard.File(path);
  WriteFileBytes(path, text);
}

std::string ReadText(const std::string& path) { return ReadFileBytes(path); }

std::vector<double> MonoFrom(const std::string& path, double fs) {
  WavData wav = ReadWav(path);
  if (wav.channels.size() != 1) throw Error(path + ": expected a mono file");
  if (wav.sample_rate != static_cast<int>(fs)) {
    throw Error(path + ": sample rate " + std::to_string(wav.sample_rate) + " does not match " +
                std::to_string(static_cast<int>(fs)));
  }
  return std::move(wav.channels[0]);
}

// Scenario source signals: files when given, else synthetic speech.
struct Sources {
  std::vector<double> target;
  std::vector<std::vector<double>> interferers;
};

Sources LoadSources(const Scenario& scn, double seconds, std::uint64_t seed,
                    const std::string& target_wav, const std::vector<std::string>& interf_wavs) {
  const double fs = scn.geometry.sample_rate;
  SpeechSynthOptions speech;
  speech.sample_rate = fs;
  speech.seconds = seconds;
  Sources s;
  s.target = target_wav.empty() ? SynthesizeSpeech(DeriveSeed(seed, 1), speech)
                                : MonoFrom(target_wav, fs);
  if (!interf_wavs.empty() && interf_wavs.size() != scn.interferers.size()) {
    throw Error("got " + std::to_string(interf_wavs.size()) + " interferer files for " +
                std::to_string(scn.interferers.size()) + " interferers");
  }
  for (std::size_t i = 0; i < scn.interferers.size(); ++i) {
    s.interferers.push_back(interf_wavs.empty()
                                ? SynthesizeSpeech(DeriveSeed(seed, 2 + i), speech)
                                : MonoFrom(interf_wavs[i], fs));
  }
  return s;
}

std::optional<ModelParams> LoadModelIf(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return LoadModel(path);
}

int sample_rate_int(double fs) { return static_cast<int>(fs); }

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed-beamformer fusion toolkit: design, simulate, enhance, evaluate"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Upper bound on worker threads (0 = runtime default)");

  // design
  BankFlags design_bank;
  std::string design_out;
  auto* design = app.add_subcommand("design", "Design the fixed filter bank");
  design_bank.AddDesign(design);
  design->add_option("--out", design_out, "Output filter-bank file")->required();

  // beampattern
  BankFlags bp_bank;
  std::vector<double> bp_freqs{500.0, 1000.0, 2000.0, 4000.0};
  double bp_step = 1.0;
  std::string bp_out;
  auto* beampattern = app.add_subcommand("beampattern", "Beampatterns as CSV");
  bp_bank.Add(beampattern);
  beampattern->add_option("--freqs", bp_freqs, "Frequencies in Hz (snapped to the nearest bin)")
      ->delimiter(',')
      ->capture_default_str();
  beampattern->add_option("--step", bp_step, "Angle step, degrees")->capture_default_str();
  beampattern->add_option("--out", bp_out, "Output CSV (default: stdout)");

  // simulate
  std::string sim_scenario, sim_out, sim_target;
  std::vector<std::string> sim_interf;
  double sim_seconds = 10.0;
  SeedFlag sim_seed;
  auto* simulate = app.add_subcommand("simulate", "Render a scenario to WAV files");
  simulate->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--seconds", sim_seconds, "Length of synthetic sources")->capture_default_str();
  simulate->add_option("--target-wav", sim_target, "Mono target source (default: synthetic speech)");
  simulate->add_option("--interferer-wav", sim_interf, "Mono interferer source, one per interferer");
  sim_seed.Add(simulate);

  // gen-dataset
  DatasetConfig ds;
  int ds_count = 0;
  std::string ds_out;
  bool ds_no_components = false;
  SeedFlag ds_seed;
  auto* gen = app.add_subcommand("gen-dataset", "Generate a training/evaluation dataset");
  gen->add_option("--count", ds_count, "Number of samples")->required();
  gen->add_option("--out", ds_out, "Output directory")->required();
  gen->add_option("--clip-seconds", ds.clip_seconds, "Sample length")->capture_default_str();
  gen->add_option("--source-dir", ds.source_dir, "Directory of mono WAV sources (default: synthetic)");
  gen->add_option("--nulls", ds.nulls_deg, "Null directions in degrees")->delimiter(',')->capture_default_str();
  gen->add_flag("--include-mwng", ds.include_mwng, "Put MWNG first in the bank");
  gen->add_flag("--no-components", ds_no_components, "Skip target/interference/noise WAVs");
  ds_seed.Add(gen);

  // enhance
  BankFlags enh_bank;
  std::string enh_input, enh_out, enh_mode = "acc", enh_model, enh_dump;
  AccOptions enh_acc;
  auto* enhance = app.add_subcommand("enhance", "Enhance a multichannel recording");
  enh_bank.Add(enhance);
  enhance->add_option("--input", enh_input, "M-channel WAV")->required();
  enhance->add_option("--out", enh_out, "Output mono WAV")->required();
  enhance->add_option("--mode", enh_mode, "fixed:<p>, acc or neural")->capture_default_str();
  enhance->add_option("--model", enh_model, "Weight file (neural mode)");
  enhance->add_option("--acc-step", enh_acc.step_size, "ACC step size")->capture_default_str();
  enhance->add_option("--acc-floor", enh_acc.weight_floor, "ACC weight floor")->capture_default_str();
  enhance->add_option("--dump-weights", enh_dump, "Write the T x F x P weight trajectory here");

  // evaluate
  BankFlags ev_bank;
  std::string ev_est, ev_ref, ev_interf, ev_scenario, ev_out, ev_model;
  std::vector<std::string> ev_modes;
  double ev_seconds = 10.0;
  int ev_filter_len = 512;
  SeedFlag ev_seed;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Metric report: --est/--ref files, or every mode on a --scenario");
  ev_bank.Add(evaluate);
  evaluate->add_option("--est", ev_est, "Estimate WAV (mono)");
  evaluate->add_option("--ref", ev_ref, "Reference WAV (mono)");
  evaluate->add_option("--interf", ev_interf, "Interference reference WAV, enables SIR");
  evaluate->add_option("--scenario", ev_scenario, "Scenario JSON file");
  evaluate->add_option("--modes", ev_modes, "Modes to compare (default: every beam and acc)")
      ->delimiter(',');
  evaluate->add_option("--model", ev_model, "Weight file for neural mode");
  evaluate->add_option("--seconds", ev_seconds, "Length of synthetic sources")->capture_default_str();
  evaluate->add_option("--bss-taps", ev_filter_len, "BSS projection filter length")->capture_default_str();
  evaluate->add_option("--out", ev_out, "Output JSON (default: stdout)");
  ev_seed.Add(evaluate);

  // sir-curve
  BankFlags sc_bank;
  std::string sc_mode = "acc", sc_model, sc_out, sc_scenario;
  SirCurveOptions sc;
  SeedFlag sc_seed;
  auto* sir_curve = app.add_subcommand("sir-curve", "SIR versus interferer angle as CSV");
  sc_bank.Add(sir_curve);
  sir_curve->add_option("--mode", sc_mode, "fixed:<p>, acc or neural")->capture_default_str();
  sir_curve->add_option("--model", sc_model, "Weight file for neural mode");
  sir_curve->add_option("--scenario", sc_scenario, "Base scenario JSON (room, array, target)");
  sir_curve->add_option("--trials", sc.trials, "Trials per angle")->capture_default_str();
  sir_curve->add_option("--t60", sc.t60, "Reverberation time, seconds")->capture_default_str();
  sir_curve->add_option("--clip-seconds", sc.clip_seconds, "Source length")->capture_default_str();
  sir_curve->add_option("--snr", sc.snr_db, "Sensor SNR, dB")->capture_default_str();
  sir_curve->add_flag("--anechoic", sc.anechoic, "Direct path only");
  sir_curve->add_option("--out", sc_out, "Output CSV (default: stdout)");
  sc_seed.Add(sir_curve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (jobs < 0) throw Error("--jobs must be >= 0");
    if (jobs > 0) omp_set_num_threads(jobs);
    OutputGuard guard;

    if (*design) {
      const FilterBank bank = design_bank.Bank();
      guard.File(design_out);
      SaveFilterBank(bank, design_out);
      for (const auto& f : bank.filters) {
        out << f.label << ": " << f.fallback_bins.size() << " fallback bin(s)\n";
      }
    } else if (*beampattern) {
      if (!(bp_step > 0.0)) throw Error("--step must be positive");
      const FilterBank bank = bp_bank.Bank();
      const FrequencyGrid& grid = bank.filters[0].grid;
      std::vector<double> thetas;
      for (double d = 0.0; d <= 360.0 + 1e-9; d += bp_step) thetas.push_back(DegToRad(d));
      std::string csv = "freq_hz,theta_deg";
      for (const auto& f : bank.filters) csv += "," + f.label;
      csv += "\n";
      char buf[64];
      for (double freq : bp_freqs) {
        if (!(freq >= 0.0) || freq > grid.sample_rate / 2.0) {
          throw Error("frequency " + std::to_string(freq) + " Hz is outside [0, fs/2]");
        }
        const int bin = static_cast<int>(std::lround(freq / grid.sample_rate * grid.nfft));
        const double f_bin = grid.bin_freq(bin);
        std::vector<Beampattern> patterns;
        for (const auto& f : bank.filters) patterns.push_back(ComputeBeampattern(f, f_bin, thetas));
        for (std::size_t i = 0; i < thetas.size(); ++i) {
          std::snprintf(buf, sizeof(buf), "%.4f,%.4f", f_bin, RadToDeg(thetas[i]));
          csv += buf;
          for (const auto& p : patterns) {
            std::snprintf(buf, sizeof(buf), ",%.6f", p.magnitude_db[i]);
            csv += buf;
          }
          csv += "\n";
        }
      }
      WriteText(guard, bp_out, csv, out);
    } else if (*simulate) {
      Scenario scn = ParseScenarioJson(ReadText(sim_scenario));
      if (sim_seed.given()) scn.seed = sim_seed.Resolve();
      const Sources src = LoadSources(scn, sim_seconds, scn.seed, sim_target, sim_interf);
      const ScenarioAudio audio = SynthesizeScenario(scn, src.target, src.interferers);
      const fs::path dir(sim_out);
      guard.Dir(dir);
      fs::create_directories(dir);
      const int rate = sample_rate_int(scn.geometry.sample_rate);
      const auto write = [&](const char* name, const std::vector<std::vector<double>>& ch) {
        guard.File(dir / name);
        WriteWav((dir / name).string(), ch, rate);
      };
      write("mix.wav", audio.mixture);
      write("target.wav", audio.target);
      write("interference.wav", audio.interference);
      write("noise.wav", audio.noise);
      write("ref.wav", {audio.reference});
      guard.File(dir / "scenario.json");
      WriteFileBytes((dir / "scenario.json").string(), ScenarioToJson(scn));
    } else if (*gen) {
      ds.write_components = !ds_no_components;
      const fs::path dir(ds_out);
      guard.Dir(dir);
      guard.File(dir / "manifest.jsonl");
      guard.File(dir / "filters.bfb");
      guard.Dir(dir / "samples");
      GenerateDataset(ds, ds_count, ds_seed.Resolve(), ds_out);
    } else if (*enhance) {
      const FilterBank bank = enh_bank.Bank();
      const WavData wav = ReadWav(enh_input);
      if (wav.sample_rate != sample_rate_int(bank.filters[0].geometry.sample_rate)) {
        throw Error(enh_input + ": sample rate does not match the filter bank");
      }
      const auto model = LoadModelIf(enh_model);
      EnhanceOptions opts;
      opts.stft = StftFor(bank.filters[0].grid.nfft);
      opts.acc = enh_acc;
      opts.model = model ? &*model : nullptr;
      const EnhanceOutput res = EnhanceMultichannel(bank, wav.channels, Mode::Parse(enh_mode), opts);
      guard.File(enh_out);
      WriteWavMono(enh_out, res.signal, wav.sample_rate);
      if (!enh_dump.empty()) {
        const Mode mode = Mode::Parse(enh_mode);
        const char* name = mode.kind == Mode::Kind::kAcc      ? "acc/alpha"
                           : mode.kind == Mode::Kind::kNeural ? "fusion/mask"
                                                              : "fixed/weights";
        Tensor t{name,
                 {static_cast<std::uint32_t>(res.weights.frames),
                  static_cast<std::uint32_t>(res.weights.bins),
                  static_cast<std::uint32_t>(res.weights.beams)},
                 res.weights.values};
        guard.File(enh_dump);
        WriteFileBytes(enh_dump, EncodeTensorFile("BFT1", 1, "", {t}, ElementType::kFloat32));
      }
    } else if (*evaluate) {
      std::string report;
      if (!ev_scenario.empty()) {
        Scenario scn = ParseScenarioJson(ReadText(ev_scenario));
        if (ev_seed.given()) scn.seed = ev_seed.Resolve();
        const FilterBank bank = ev_bank.Bank();
        const auto model = LoadModelIf(ev_model);
        std::vector<Mode> modes;
        if (ev_modes.empty()) {
          for (int p = 0; p < bank.size(); ++p) modes.push_back({Mode::Kind::kFixed, p});
          modes.push_back({Mode::Kind::kAcc, 0});
          if (model) modes.push_back({Mode::Kind::kNeural, 0});
        } else {
          modes = ParseModes(ev_modes);
        }
        const Sources src = LoadSources(scn, ev_seconds, scn.seed, "", {});
        const ScenarioAudio audio = SynthesizeScenario(scn, src.target, src.interferers);
        EnhanceOptions opts;
        opts.stft = StftFor(bank.filters[0].grid.nfft);
        opts.model = model ? &*model : nullptr;
        report = MetricReportsToJson(EvaluateScenario(bank, audio, scn, modes, opts, ev_filter_len));
      } else {
        if (ev_est.empty() || ev_ref.empty()) {
          throw Error("evaluate needs --scenario, or --est and --ref");
        }
        const WavData est = ReadWav(ev_est);
        const WavData ref = ReadWav(ev_ref);
        if (est.channels.size() != 1 || ref.channels.size() != 1) {
          throw Error("--est and --ref must be mono");
        }
        Json doc = {{"db_cap", kDbCap}, {"si_sdr_db", SiSdr(est.channels[0], ref.channels[0])}};
        if (!ev_interf.empty()) {
          const WavData interf = ReadWav(ev_interf);
          if (interf.channels.size() != 1) throw Error("--interf must be mono");
          doc["sir_db"] =
              BssSir(est.channels[0], ref.channels[0], interf.channels[0], ev_filter_len).sir_db;
        }
        report = doc.dump(2) + "\n";
      }
      WriteText(guard, ev_out, report, out);
    } else if (*sir_curve) {
      const FilterBank bank = sc_bank.Bank();
      Scenario base;
      if (!sc_scenario.empty()) base = ParseScenarioJson(ReadText(sc_scenario));
      base.geometry = bank.filters[0].geometry;
      base.room.sample_rate = base.geometry.sample_rate;
      const auto model = LoadModelIf(sc_model);
      EnhanceOptions opts;
      opts.stft = StftFor(bank.filters[0].grid.nfft);
      opts.model = model ? &*model : nullptr;
      sc.seed = sc_seed.Resolve();
      const auto curves = SirVsAngle(bank, base, {Mode::Parse(sc_mode)}, opts, sc);
      WriteText(guard, sc_out, SirCurveToCsv(curves[0]), out);
    }
    guard.Commit();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace beamfusion
