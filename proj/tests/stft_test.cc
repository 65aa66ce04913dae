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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "beamfusion/stft.h"
#include "test_util.h"

namespace beamfusion {
namespace {

using testing::DirectDft;
using testing::RandomSignal;
using testing::RelL2;

TEST_CASE("window pair is constant overlap-add") {
  StftConfig cfg;
  const auto wa = AnalysisWindow(cfg);
  const auto ws = SynthesisWindow(cfg);
  for (int n = 0; n < cfg.hop; ++n) {
    double sum = 0.0;
    for (int s = n; s < cfg.window_len; s += cfg.hop) sum += wa[s] * ws[s];
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
}

TEST_CASE("zeros analyze and synthesize to zeros") {
  StftConfig cfg;
  const std::vector<double> x(4000, 0.0);
  const Spectrogram s = Analyze(x, cfg);
  CHECK(s.data.cwiseAbs().maxCoeff() == 0.0);
  for (double v : Synthesize(s)) CHECK(v == 0.0);
}

TEST_CASE("frame layout and output length") {
  StftConfig cfg;
  CHECK(cfg.padding() == 384);
  const Spectrogram s = Analyze(RandomSignal(1000, 1), cfg);
  CHECK(s.frames() == 1000 / 128);
  CHECK(s.bins() == 257);
  CHECK(Synthesize(s).size() == static_cast<std::size_t>(s.frames() * 128 + 512 - 128));
}

TEST_CASE("bin-centred sinusoid matches a direct DFT of the windowed frame") {
  StftConfig cfg;
  const int k0 = 40;
  std::vector<double> x(8192);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::cos(2.0 * M_PI * k0 * n / 512.0);
  const Spectrogram s = Analyze(x, cfg);
  const auto w = AnalysisWindow(cfg);
  const int t = 20;
  const long start = t * cfg.hop - cfg.padding();
  std::vector<double> frame(512);
  double dc_gain = 0.0;
  for (int n = 0; n < 512; ++n) {
    frame[n] = w[n] * x[start + n];
    dc_gain += w[n];
  }
  const auto ref = DirectDft(frame);
  for (int k = 0; k < 257; ++k) CHECK(std::abs(s.data(t, k) - ref[k]) < 1e-9);
  CHECK(std::abs(s.data(t, k0)) == doctest::Approx(dc_gain / 2.0).epsilon(1e-3));
  int argmax = 0;
  for (int k = 0; k < 257; ++k) {
    if (std::abs(s.data(t, k)) > std::abs(s.data(t, argmax))) argmax = k;
  }
  CHECK(argmax == k0);
}

TEST_CASE("round trip reconstructs interior samples") {
  StftConfig cfg;
  for (std::size_t len : {512u, 777u, 4096u, 16001u, 48000u}) {
    const auto x = RandomSignal(len, len);
    const auto y = SynthesizeAligned(Analyze(x, cfg), len);
    REQUIRE(y.size() == len);
    const std::size_t end = (len / cfg.hop) * cfg.hop;  // last complete frame
    if (end > 2 * 512u) CHECK(RelL2(y, x, 512, end - 512) <= 1e-6);
  }
}

TEST_CASE("synthesis is linear") {
  StftConfig cfg;
  const Spectrogram a = Analyze(RandomSignal(6000, 2), cfg);
  Spectrogram b = Analyze(RandomSignal(6000, 3), cfg);
  Spectrogram sum = a;
  sum.data += b.data;
  const auto ya = Synthesize(a), yb = Synthesize(b), ys = Synthesize(sum);
  for (std::size_t i = 0; i < ys.size(); ++i) CHECK(std::abs(ys[i] - ya[i] - yb[i]) < 1e-10);
}

TEST_CASE("Parseval holds per frame") {
  StftConfig cfg;
  const auto x = RandomSignal(5000, 4);
  const Spectrogram s = Analyze(x, cfg);
  const auto w = AnalysisWindow(cfg);
  for (int t = 3; t < s.frames(); t += 7) {
    double time_energy = 0.0;
    for (int n = 0; n < 512; ++n) {
      const long i = t * 128 - 384 + n;
      const double v = (i >= 0 && i < 5000) ? w[n] * x[i] : 0.0;
      time_energy += v * v;
    }
    double freq_energy = std::norm(s.data(t, 0)) + std::norm(s.data(t, 256));
    for (int k = 1; k < 256; ++k) freq_energy += 2.0 * std::norm(s.data(t, k));
    freq_energy /= 512.0;
    CHECK(std::abs(freq_energy - time_energy) <= 1e-8 * time_energy);
  }
}

TEST_CASE("analyzing a prefix gives bit-identical frames") {
  StftConfig cfg;
  const auto x = RandomSignal(9000, 5);
  const Spectrogram full = Analyze(x, cfg);
  const Spectrogram pre = Analyze(std::span<const double>(x).first(3000), cfg);
  for (int t = 0; t < pre.frames(); ++t) {
    for (int k = 0; k < 257; ++k) CHECK(pre.data(t, k) == full.data(t, k));
  }
}

TEST_CASE("streaming analyzer and synthesizer match batch bit for bit") {
  StftConfig cfg;
  const auto x = RandomSignal(128 * 40, 6);
  const Spectrogram batch = Analyze(x, cfg);
  StreamingAnalyzer ana(cfg);
  StreamingSynthesizer syn(cfg);
  std::vector<Complex> frame(257);
  std::vector<double> streamed;
  std::vector<double> hop(128);
  for (int t = 0; t < batch.frames(); ++t) {
    ana.Push(std::span<const double>(x).subspan(t * 128, 128), frame);
    for (int k = 0; k < 257; ++k) REQUIRE(frame[k] == batch.data(t, k));
    syn.Push(frame, hop);
    streamed.insert(streamed.end(), hop.begin(), hop.end());
  }
  std::vector<double> tail(512 - 128);
  syn.Flush(tail);
  streamed.insert(streamed.end(), tail.begin(), tail.end());
  const auto ref = Synthesize(batch);
  REQUIRE(streamed.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) REQUIRE(streamed[i] == ref[i]);
}

TEST_CASE("serial and parallel transforms agree bit for bit") {
  StftConfig cfg;
  const auto x = RandomSignal(20000, 7);
  const Spectrogram a = Analyze(x, cfg, Exec::kSerial);
  const Spectrogram b = Analyze(x, cfg, Exec::kParallel);
  CHECK(a.data == b.data);
  CHECK(Synthesize(a, Exec::kSerial) == Synthesize(a, Exec::kParallel));
}

TEST_CASE("multichannel analysis is channel-wise") {
  StftConfig cfg;
  std::vector<std::vector<double>> ch{RandomSignal(3000, 8), RandomSignal(3000, 9),
                                      RandomSignal(3000, 10)};
  const auto mc = AnalyzeMultichannel(ch, cfg);
  REQUIRE(mc.num_channels() == 3);
  for (int c = 0; c < 3; ++c) CHECK(mc.channels[c].data == Analyze(ch[c], cfg).data);
  ch[1].pop_back();
  CHECK_THROWS_AS(AnalyzeMultichannel(ch, cfg), Error);
}

TEST_CASE("analysis rejects bad input") {
  StftConfig cfg;
  CHECK_THROWS_AS(Analyze(std::vector<double>{}, cfg), Error);
  CHECK_THROWS_AS(Analyze(std::vector<double>(100, 0.0), cfg), Error);
  auto x = RandomSignal(2000, 11);
  x[700] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Analyze(x, cfg), Error);
  StftConfig bad = cfg;
  bad.hop = 100;
  CHECK_THROWS_AS(bad.Validate(), Error);
}

}  // namespace
}  // namespace beamfusion
