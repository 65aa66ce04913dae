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

#include "beamfusion/pipeline.h"

#include <charconv>
#include <cmath>

#include "beamfusion/speech_synth.h"

namespace beamfusion {

Mode Mode::Parse(const std::string& text) {
  if (text == "acc") return {Kind::kAcc, 0};
  if (text == "neural") return {Kind::kNeural, 0};
  if (text.rfind("fixed:", 0) == 0) {
    const std::string digits = text.substr(6);
    int beam = -1;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), beam);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && beam >= 0) {
      return {Kind::kFixed, beam};
    }
  }
  throw Error("unknown mode '" + text + "' (expected fixed:<p>, acc or neural)");
}

std::string Mode::ToString() const {
  switch (kind) {
    case Kind::kAcc:
      return "acc";
    case Kind::kNeural:
      return "neural";
    case Kind::kFixed:
      break;
  }
  return "fixed:" + std::to_string(beam);
}

std::string MethodName(const FilterBank& bank, const Mode& mode) {
  switch (mode.kind) {
    case Mode::Kind::kAcc:
      return "ACC";
    case Mode::Kind::kNeural:
      return "Neural";
    case Mode::Kind::kFixed:
      break;
  }
  if (mode.beam < bank.size()) return bank.filters[mode.beam].label;
  return mode.ToString();
}

EnhanceOutput EnhanceMultichannel(const FilterBank& bank,
                                  const std::vector<std::vector<double>>& mics,
                                  const Mode& mode, const EnhanceOptions& opts) {
  bank.Validate();
  if (mics.empty() || mics[0].empty()) throw Error("enhance: empty input");
  const int num_mics = bank.filters[0].geometry.num_mics;
  if (static_cast<int>(mics.size()) != num_mics) {
    throw Error("enhance: input has " + std::to_string(mics.size()) +
                " channels, filter bank expects " + std::to_string(num_mics));
  }
  if (bank.filters[0].grid.nfft != opts.stft.nfft) {
    throw Error("enhance: filter bank nfft does not match the STFT configuration");
  }
  const std::size_t length = mics[0].size();
  EnhanceOutput out;
  out.beams = ApplyBank(bank, AnalyzeMultichannel(mics, opts.stft, opts.exec), opts.exec);
  const int frames = out.beams[0].frames();
  const int bins = out.beams[0].bins();
  const int beams = bank.size();

  switch (mode.kind) {
    case Mode::Kind::kFixed: {
      if (mode.beam >= beams) {
        throw Error("enhance: beam " + std::to_string(mode.beam) + " out of range (bank has " +
                    std::to_string(beams) + ")");
      }
      out.weights = WeightTrajectory(frames, bins, beams);
      for (int t = 0; t < frames; ++t) {
        for (int k = 0; k < bins; ++k) out.weights.at(t, k, mode.beam) = 1.0;
      }
      out.fused = FuseTrajectory(out.beams, out.weights, opts.exec);
      out.signal = SynthesizeAligned(out.fused, length, opts.exec);
      break;
    }
    case Mode::Kind::kAcc: {
      AccResult acc = RunAcc(out.beams, opts.acc, opts.exec);
      out.weights = std::move(acc.trajectory);
      out.fused = std::move(acc.fused);
      out.signal = SynthesizeAligned(out.fused, length, opts.exec);
      break;
    }
    case Mode::Kind::kNeural: {
      if (opts.model == nullptr) throw Error("enhance: neural mode needs a weight file");
      const ModelHeader& h = opts.model->header;
      if (h.beams != beams || h.bins != bins || !(h.stft == opts.stft)) {
        throw Error("enhance: model header does not match the filter bank / STFT setup");
      }
      EnhanceResult res = EnhanceStream(*opts.model, out.beams, length, opts.exec);
      out.weights = std::move(res.masks);
      out.fused = std::move(res.fused);
      out.signal = std::move(res.signal);
      break;
    }
  }
  return out;
}

std::vector<MetricReport> EvaluateScenario(const FilterBank& bank,
                                           const ScenarioAudio& audio,
                                           const Scenario& scenario,
                                           const std::vector<Mode>& modes,
                                           const EnhanceOptions& opts,
                                           int bss_filter_len) {
  const std::size_t num_mics = audio.mixture.size();
  const std::size_t n = audio.mixture.at(0).size();
  std::vector<std::vector<double>> residual(num_mics, std::vector<double>(n));
  for (std::size_t m = 0; m < num_mics; ++m) {
    for (std::size_t s = 0; s < n; ++s) {
      residual[m][s] = audio.interference[m][s] + audio.noise[m][s];
    }
  }
  const double si_sdr_in = SiSdr(audio.mixture[0], audio.reference);

  std::vector<MetricReport> reports;
  for (const Mode& mode : modes) {
    const EnhanceOutput enh = EnhanceMultichannel(bank, audio.mixture, mode, opts);
    const auto target_out = ShadowProcess(bank, enh.weights, audio.target, opts.stft, opts.exec);
    const auto residual_out = ShadowProcess(bank, enh.weights, residual, opts.stft, opts.exec);

    MetricReport r;
    r.method = MethodName(bank, mode);
    r.t60_s = scenario.room.t60;
    r.snr_db = scenario.snr_db;
    r.delta_snr_db = DeltaSnr(audio.target[0], residual[0], target_out, residual_out);
    r.si_sdr_db = SiSdr(enh.signal, audio.reference);
    r.delta_si_sdr_db = r.si_sdr_db - si_sdr_in;
    if (Energy(audio.interference[0]) > 0.0) {
      r.sir_db = BssSir(enh.signal, audio.target[0], audio.interference[0], bss_filter_len).sir_db;
    } else {
      r.sir_db = kDbCap;
    }
    reports.push_back(r);
  }
  return reports;
}

std::vector<std::vector<SirPoint>> SirVsAngle(const FilterBank& bank,
                                              const Scenario& base,
                                              const std::vector<Mode>& modes,
                                              const EnhanceOptions& opts,
                                              const SirCurveOptions& curve) {
  if (curve.trials < 1) throw Error("sir curve: trials must be at least 1");
  if (!(curve.step_deg > 0.0) || curve.stop_deg < curve.start_deg) {
    throw Error("sir curve: invalid angle range");
  }
  const int num_angles =
      static_cast<int>(std::floor((curve.stop_deg - curve.start_deg) / curve.step_deg + 1e-9)) + 1;
  std::vector<std::vector<SirPoint>> out(modes.size(), std::vector<SirPoint>(num_angles));
  SpeechSynthOptions speech;
  speech.sample_rate = base.geometry.sample_rate;
  speech.seconds = curve.clip_seconds;

  for (int a = 0; a < num_angles; ++a) {
    const double angle = curve.start_deg + a * curve.step_deg;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      out[i][a] = {angle, 0.0, curve.trials};
    }
    for (int trial = 0; trial < curve.trials; ++trial) {
      const std::uint64_t trial_seed =
          DeriveSeed(curve.seed, static_cast<std::uint64_t>(a) * 1000003u + trial);
      Scenario scn = base;
      scn.room.t60 = curve.t60;
      if (curve.anechoic) scn.room.max_order = 0;
      scn.snr_db = curve.snr_db;
      scn.seed = DeriveSeed(trial_seed, 0);
      scn.interferers = {StaticTrajectory{
          PolarPosition(base.array_center, base.target_distance, angle)}};
      const auto target = SynthesizeSpeech(DeriveSeed(trial_seed, 1), speech);
      const auto interf = SynthesizeSpeech(DeriveSeed(trial_seed, 2), speech);
      const ScenarioAudio audio = SynthesizeScenario(scn, target, {interf});
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const EnhanceOutput enh = EnhanceMultichannel(bank, audio.mixture, modes[i], opts);
        out[i][a].sir_db +=
            BssSir(enh.signal, audio.target[0], audio.interference[0], curve.bss_filter_len).sir_db;
      }
    }
    for (std::size_t i = 0; i < modes.size(); ++i) out[i][a].sir_db /= curve.trials;
  }
  return out;
}

}  // namespace beamfusion
