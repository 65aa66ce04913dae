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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "beamfusion/acc.h"
#include "beamfusion/beamformer.h"
#include "beamfusion/commands.h"
#include "beamfusion/fusion.h"
#include "beamfusion/metrics.h"
#include "beamfusion/pipeline.h"
#include "beamfusion/roomsim.h"
#include "beamfusion/speech_synth.h"
#include "beamfusion/stft.h"
#include "beamfusion/tensor_file.h"

namespace bf = beamfusion;
namespace fs = std::filesystem;
using bf::Complex;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void Expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int g_failures = 0;

void Criterion(const char* name, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!c.ok) ++g_failures;
  std::printf("%s  %-26s %s (%.1f s)\n", c.ok ? "PASS" : "FAIL", name, c.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

double Seconds(const std::function<void()>& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> Noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

double RelL2(const std::vector<double>& a, const std::vector<double>& b, std::size_t lo,
             std::size_t hi) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

bf::FilterBank DefaultBank(bool include_mwng = false) {
  std::vector<double> nulls;
  for (double d : {90.0, 120.0, 150.0, 180.0}) nulls.push_back(bf::DegToRad(d));
  return bf::DesignDmaBank(bf::ArrayGeometry{}, bf::FrequencyGrid{}, 0.0, nulls, include_mwng);
}

// h^H d(theta) from the coefficients and an independently computed steering vector.
Complex Response(const bf::CMatrix& coeffs, const bf::ArrayGeometry& g, double freq, int bin,
                 double theta) {
  Complex r = 0.0;
  for (int m = 0; m < g.num_mics; ++m) {
    const Complex d = std::polar(1.0, -2.0 * bf::kPi * freq * m * g.tau0() * std::cos(theta));
    r += std::conj(coeffs(bin, m)) * d;
  }
  return r;
}

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void StftRoundTrip(Check& c) {
  const auto x = Noise(160000, 1);
  const bf::StftConfig cfg;
  std::vector<double> y;
  const double secs = Seconds([&] { y = bf::SynthesizeAligned(bf::Analyze(x, cfg), x.size()); });
  const double err = RelL2(y, x, cfg.window_len, x.size() - cfg.window_len);
  c.detail << "rel L2 " << Fmt("%.2e", err) << ", " << Fmt("%.3f", secs) << " s";
  c.Expect(err <= 1e-6, "error <= 1e-6");
  c.Expect(secs < 1.0, "runtime < 1 s");
}

void DesignConstraints(Check& c) {
  const bf::FilterBank bank = DefaultBank(true);
  double worst_look = 0.0, worst_null = 0.0, worst_wng = 0.0;
  int checked = 0;
  for (const auto& f : bank.filters) {
    for (int k = 0; k < f.grid.num_bins(); ++k) {
      const double freq = f.grid.bin_freq(k);
      if (f.label == "MWNG") {
        const double wng = 10.0 * std::log10(bf::WhiteNoiseGain(f, k, 0.0));
        worst_wng = std::max(worst_wng, std::abs(wng - 10.0 * std::log10(8.0)));
        continue;
      }
      if (f.IsFallback(k)) continue;
      ++checked;
      worst_look = std::max(worst_look, std::abs(Response(f.coeffs, f.geometry, freq, k, 0.0) - 1.0));
      worst_null = std::max(worst_null, std::abs(Response(f.coeffs, f.geometry, freq, k, *f.theta_null)));
    }
  }
  c.detail << checked << " DMA bins, max |h^H d_s - 1| " << Fmt("%.1e", worst_look)
           << ", max |h^H d_null| " << Fmt("%.1e", worst_null) << ", MWNG WNG err "
           << Fmt("%.1e", worst_wng) << " dB";
  c.Expect(bank.size() == 5, "bank holds MWNG and four DMAs");
  c.Expect(checked == 4 * 256, "DC is the only degenerate bin");
  c.Expect(worst_look <= 1e-8, "look <= 1e-8");
  c.Expect(worst_null <= 1e-6, "null <= 1e-6");
  c.Expect(worst_wng <= 1e-9, "WNG within 1e-9 dB");
}

void SimplexCombination(Check& c) {
  const bf::FilterBank bank = DefaultBank();
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    std::vector<double> a(bank.size());
    double s = 0.0;
    for (double& v : a) s += (v = e(rng));
    bf::CMatrix h = bf::CMatrix::Zero(257, 8);
    for (int p = 0; p < bank.size(); ++p) h += (a[p] / s) * bank.filters[p].coeffs;
    const auto& f0 = bank.filters[0];
    for (int k = 0; k < 257; ++k) {
      worst = std::max(worst, std::abs(Response(h, f0.geometry, f0.grid.bin_freq(k), k, 0.0) - 1.0));
    }
  }
  c.detail << "100 draws x 257 bins, max residual " << Fmt("%.1e", worst);
  c.Expect(worst <= 1e-8, "residual <= 1e-8");
}

void Acc(Check& c) {
  // Scalar recursion oracle for P = 2 with Z_0 = 0, Z_1 = 1.
  const bf::AccOptions opt{0.1, 1e-4};
  bf::AccState state(2, 1, opt);
  bf::CMatrix frame(1, 2);
  frame(0, 0) = 0.0;
  frame(0, 1) = 1.0;
  std::vector<Complex> fused(1);
  bf::RMatrix used;
  double a0 = 0.5, a1 = 0.5, oracle_err = 0.0;
  bool monotone = true;
  for (int i = 0; i < 500; ++i) {
    state.Step(frame, fused, &used);
    oracle_err = std::max({oracle_err, std::abs(used(0, 0) - a0), std::abs(used(0, 1) - a1)});
    const double w1 = a1 * std::exp(-opt.step_size * 2.0 * a1 / (1.0 + 1e-12));
    const double n0 = std::max(a0 / (a0 + w1), opt.weight_floor);
    const double n1 = std::max(w1 / (a0 + w1), opt.weight_floor);
    monotone = monotone && n0 / (n0 + n1) >= a0;
    a0 = n0 / (n0 + n1);
    a1 = n1 / (n0 + n1);
  }

  // Anechoic room, target at 0 degrees, stationary interferer at 120 degrees.
  bf::Scenario scn;
  scn.room.t60 = 0.0;
  scn.interferers.push_back(bf::StaticTrajectory{bf::PolarPosition(scn.array_center, 2.0, 120.0)});
  scn.snr_db = 30.0;
  scn.seed = 2;
  const auto target = bf::SynthesizeSpeech(10, {.seconds = 8.0});
  const auto interf = bf::SynthesizeSpeech(11, {.seconds = 8.0});
  const bf::ScenarioAudio audio = bf::SynthesizeScenario(scn, target, {interf});
  const bf::FilterBank bank = DefaultBank();
  const bf::EnhanceOutput out =
      bf::EnhanceMultichannel(bank, audio.mixture, bf::Mode::Parse("acc"), bf::EnhanceOptions{});
  const bf::WeightTrajectory& w = out.weights;
  std::vector<double> mean(bank.size(), 0.0);
  long long count = 0;
  const bf::StftConfig cfg;
  for (int t = 0; t < w.frames; ++t) {
    if (t * cfg.hop < 5 * 16000) continue;
    for (int k = 0; k < w.bins; ++k) {
      const double f = k * 16000.0 / cfg.nfft;
      if (f < 500.0 || f > 4000.0) continue;
      for (int p = 0; p < w.beams; ++p) mean[p] += w.at(t, k, p);
      ++count;
    }
  }
  for (double& m : mean) m /= static_cast<double>(count);
  const int best = static_cast<int>(std::max_element(mean.begin(), mean.end()) - mean.begin());
  c.detail << "simplex err " << Fmt("%.1e", w.MaxSimplexError()) << ", min "
           << Fmt("%.1e", w.MinEntry()) << "; mean weights after 5 s [";
  for (int p = 0; p < bank.size(); ++p) c.detail << (p ? " " : "") << Fmt("%.3f", mean[p]);
  c.detail << "] -> " << bank.filters[best].label << "; EG oracle err " << Fmt("%.1e", oracle_err);
  c.Expect(w.MaxSimplexError() <= 1e-10, "sum 1 +- 1e-10");
  c.Expect(w.MinEntry() >= 0.0, "entries >= 0");
  c.Expect(best == 1, "DMA-II has the largest mean weight");
  c.Expect(oracle_err <= 1e-10, "oracle within 1e-10");
  c.Expect(monotone, "alpha_0 monotone");
}

void Ism(Check& c) {
  bf::RoomConfig room;
  room.t60 = 0.0;
  double worst_idx = 0.0, worst_amp = 0.0;
  const std::vector<std::pair<bf::Position, bf::Position>> pairs{
      {{2.0, 3.0, 1.5}, {2.0 + 100.0 * 343.0 / 16000.0, 3.0, 1.5}},
      {{6.0, 2.0, 1.0}, {4.0, 2.0, 1.0}},
      {{1.3, 1.1, 0.9}, {5.17, 4.02, 2.2}},
      {{7.2, 5.1, 2.5}, {3.33, 0.71, 0.4}}};
  for (const auto& [src, mic] : pairs) {
    const double d = std::hypot(src[0] - mic[0], src[1] - mic[1], src[2] - mic[2]);
    const double delay = d * room.sample_rate / room.sound_speed;
    const bf::Rir r = bf::IsmRir(room, src, mic);
    const auto peak = std::max_element(r.taps.begin(), r.taps.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
    worst_idx = std::max(worst_idx, std::abs((peak - r.taps.begin()) - std::round(delay)));
    const double frac = delay - std::floor(delay);
    // The band-limited pulse spreads a fractional delay over neighbouring
    // taps, so its area carries the amplitude; at integer delay the peak does.
    double amp = *peak;
    if (frac > 1e-9 && frac < 1.0 - 1e-9) {
      amp = 0.0;
      for (double v : r.taps) amp += v;
    }
    worst_amp = std::max(worst_amp, std::abs(amp * 4.0 * bf::kPi * d - 1.0));
  }
  c.detail << "direct path: max index err " << worst_idx << " samples, max amp err "
           << Fmt("%.2f", 100.0 * worst_amp) << "%; -60 dB decay:";
  c.Expect(worst_idx <= 1.0, "index within 1 sample");
  c.Expect(worst_amp <= 0.02, "amplitude within 2%");
  for (double t60 : {0.3, 0.7}) {
    bf::RoomConfig rev;
    rev.t60 = t60;
    const bf::Rir r = bf::IsmRir(rev, {6.0, 2.0, 1.0}, {4.0, 2.0, 1.0});
    std::vector<double> edc(r.taps.size());
    double acc = 0.0;
    for (std::size_t i = r.taps.size(); i-- > 0;) edc[i] = (acc += r.taps[i] * r.taps[i]);
    double t = INFINITY;
    for (std::size_t i = 0; i < edc.size(); ++i) {
      if (10.0 * std::log10(edc[i] / acc) <= -60.0) {
        t = i / rev.sample_rate;
        break;
      }
    }
    c.detail << " " << Fmt("%.3f", t) << " s (target " << t60 << ")";
    c.Expect(std::abs(t - t60) <= 0.2 * t60, "T60 within 20%");
  }
}

void Metrics(Check& c) {
  const auto s = Noise(160000, 3);
  const auto i = Noise(160000, 4);
  std::vector<double> est(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) est[n] = s[n] + 0.1 * i[n];
  const double sir = bf::BssSir(est, s, i).sir_db;
  // Gram-Schmidt: remove the component of noise along s, scale to |s|^2 / 100.
  auto e = Noise(160000, 5);
  double es = 0.0, ss = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    es += e[n] * s[n];
    ss += s[n] * s[n];
  }
  double ee = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n) ee += (e[n] -= es / ss * s[n]) * e[n];
  const double g = std::sqrt(ss / 100.0 / ee);
  for (std::size_t n = 0; n < s.size(); ++n) est[n] = s[n] + g * e[n];
  const double sdr = bf::SiSdr(est, s);
  c.detail << "BSS SIR " << Fmt("%.3f", sir) << " dB, SI-SDR " << Fmt("%.9f", sdr) << " dB";
  c.Expect(std::abs(sir - 20.0) <= 0.5, "SIR 20 +- 0.5");
  c.Expect(std::abs(sdr - 20.0) <= 1e-6, "SI-SDR 20 +- 1e-6");
}

std::vector<bf::Spectrogram> RandomBeams(const bf::ModelHeader& h, int frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<bf::Spectrogram> beams(h.beams);
  for (auto& b : beams) {
    b.config = h.stft;
    b.data.resize(frames, h.bins);
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < h.bins; ++k) b.data(t, k) = Complex(g(rng), g(rng));
    }
  }
  return beams;
}

void Neural(Check& c) {
  const bf::ModelHeader h;
  const int frames = 40;
  const std::size_t length = frames * h.stft.hop;
  const auto beams = RandomBeams(h, frames, 6);

  bf::ModelParams zero_dec = bf::ModelParams::Random(h, 7);
  zero_dec.dec_w.setZero();
  zero_dec.dec_b.setZero();
  const bf::EnhanceResult uni = bf::EnhanceStream(zero_dec, beams, length);
  double mean_err = 0.0;
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < h.bins; ++k) {
      Complex m = 0.0;
      for (const auto& b : beams) m += b.data(t, k);
      m /= static_cast<double>(h.beams);
      mean_err = std::max(mean_err, std::abs(uni.fused.data(t, k) - m));
    }
  }

  const bf::ModelParams model = bf::ModelParams::Random(h, 8);
  const bf::EnhanceResult stream = bf::EnhanceStream(model, beams, length);
  const bf::WeightTrajectory batch = bf::InferMasks(model, beams, bf::Exec::kParallel);
  const bool stream_exact = batch.values == stream.masks.values;

  auto other = beams;
  for (auto& b : other) b.data.bottomRows(15) = RandomBeams(h, 15, 9)[0].data;
  const bf::WeightTrajectory wa = bf::InferMasks(model, beams);
  const bf::WeightTrajectory wb = bf::InferMasks(model, other);
  bool causal = true;
  for (int t = 0; t < frames - 15; ++t) {
    for (int k = 0; k < h.bins; ++k) {
      for (int p = 0; p < h.beams; ++p) causal = causal && wa.at(t, k, p) == wb.at(t, k, p);
    }
  }
  const bool later_differs = wa.at(frames - 1, 10, 0) != wb.at(frames - 1, 10, 0);

  const std::string bytes = bf::EncodeModel(model);
  const bool round_trip = bf::EncodeModel(bf::DecodeModel(bytes)) == bytes;

  c.detail << "uniform-mask fused vs beam mean " << Fmt("%.1e", mean_err) << ", streaming==batch "
           << (stream_exact ? "yes" : "no") << ", causal " << (causal ? "yes" : "no")
           << ", BFW1 byte round trip " << (round_trip ? "yes" : "no");
  c.Expect(mean_err <= 1e-12, "beam mean within 1e-12");
  c.Expect(stream_exact, "streaming bit-exact");
  c.Expect(causal && later_differs, "paired-input causality");
  c.Expect(round_trip, "BFW1 byte-identical");
}

void EndToEnd(Check& c) {
  // Plane wave from the look direction, built per bin as X * d(theta_s).
  const bf::FilterBank bank = DefaultBank();
  const bf::StftConfig cfg;
  const auto x = bf::SynthesizeSpeech(12, {.seconds = 4.0});
  const bf::Spectrogram sx = bf::Analyze(x, cfg);
  const bf::ArrayGeometry geom;
  bf::MultichannelSpectrogram mics;
  for (int m = 0; m < geom.num_mics; ++m) {
    bf::Spectrogram ch = sx;
    for (int k = 0; k < sx.bins(); ++k) {
      const double freq = k * geom.sample_rate / cfg.nfft;
      ch.data.col(k) *= std::polar(1.0, -2.0 * bf::kPi * freq * m * geom.tau0());
    }
    mics.channels.push_back(std::move(ch));
  }
  const auto beams = bf::ApplyBank(bank, mics);
  const std::size_t lo = cfg.window_len, hi = x.size() - cfg.window_len;

  double worst = 0.0;
  for (int p = 0; p < bank.size(); ++p) {
    bf::WeightTrajectory one(sx.frames(), sx.bins(), bank.size());
    for (int t = 0; t < sx.frames(); ++t) {
      for (int k = 0; k < sx.bins(); ++k) one.at(t, k, p) = 1.0;
    }
    const auto y = bf::SynthesizeAligned(bf::FuseTrajectory(beams, one), x.size());
    worst = std::max(worst, RelL2(y, x, lo, hi));
  }
  const double fixed_err = worst;
  const auto y_acc = bf::SynthesizeAligned(bf::RunAcc(beams).fused, x.size());
  const double acc_err = RelL2(y_acc, x, lo, hi);
  const bf::ModelParams zeros = bf::ModelParams::Zeros(bf::ModelHeader{});
  const double neural_err = RelL2(bf::EnhanceStream(zeros, beams, x.size()).signal, x, lo, hi);
  c.detail << "rel L2 fixed (worst beam) " << Fmt("%.1e", fixed_err) << ", ACC "
           << Fmt("%.1e", acc_err) << ", uniform neural " << Fmt("%.1e", neural_err);
  c.Expect(fixed_err <= 1e-4, "fixed <= 1e-4");
  c.Expect(acc_err <= 1e-4, "ACC <= 1e-4");
  c.Expect(neural_err <= 1e-4, "neural <= 1e-4");
}

int Cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"beamfusion"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = bf::RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

void Determinism(Check& c) {
  const fs::path root = fs::temp_directory_path() /
                        ("beamfusion_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{root};
  double secs[2];
  for (int run = 0; run < 2; ++run) {
    const std::string out = (root / (run ? "b" : "a")).string();
    int code = 0;
    secs[run] = Seconds([&] { code = Cli({"gen-dataset", "--count", "50", "--seed", "2024", "--out", out}); });
    c.Expect(code == 0, "gen-dataset exit 0");
  }
  std::size_t files = 0, bytes = 0, mismatched = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root / "a");
    const std::string a = bf::ReadFileBytes(e.path().string());
    const fs::path other = root / "b" / rel;
    if (!fs::exists(other) || bf::ReadFileBytes(other.string()) != a) ++mismatched;
    ++files;
    bytes += a.size();
  }
  std::size_t files_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "b")) files_b += e.is_regular_file();
  c.detail << "50 samples x 2 runs: " << files << " files, " << Fmt("%.0f", bytes / 1e6)
           << " MB each, " << mismatched << " mismatched; runtimes " << Fmt("%.1f", secs[0])
           << " s / " << Fmt("%.1f", secs[1]) << " s";
  c.Expect(files > 50 && files == files_b && mismatched == 0, "byte-identical outputs");
  c.Expect(secs[0] < 120.0 && secs[1] < 120.0, "each run < 2 min");
}

}  // namespace

int main() {
  Criterion("stft-round-trip", StftRoundTrip);
  Criterion("design-constraints", DesignConstraints);
  Criterion("simplex-distortionless", SimplexCombination);
  Criterion("acc", Acc);
  Criterion("ism", Ism);
  Criterion("bss-sir-si-sdr", Metrics);
  Criterion("neural-inference", Neural);
  Criterion("end-to-end-distortionless", EndToEnd);
  Criterion("dataset-determinism", Determinism);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
