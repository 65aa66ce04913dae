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
#include <vector>

#include <Eigen/QR>
#include <json.hpp>

#include "beamfusion/metrics.h"
#include "beamfusion/speech_synth.h"
#include "test_util.h"

namespace beamfusion {
namespace {

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// est = ref + e with e orthogonal to ref and |e|^2 = |ref|^2 * 10^(-db/10).
std::vector<double> AtSdr(const std::vector<double>& ref, double db, std::uint64_t seed) {
  auto e = testing::RandomSignal(ref.size(), seed);
  const double k = Dot(e, ref) / Dot(ref, ref);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= k * ref[i];
  const double g = std::sqrt(Dot(ref, ref) * std::pow(10.0, -db / 10.0) / Dot(e, e));
  std::vector<double> out(ref);
  for (std::size_t i = 0; i < e.size(); ++i) out[i] += g * e[i];
  return out;
}

TEST_CASE("SI-SDR of an orthogonal distortion") {
  const auto ref = testing::RandomSignal(16000, 1);
  for (double db : {-5.0, 0.0, 20.0, 37.5}) {
    CHECK(std::abs(SiSdr(AtSdr(ref, db, 2), ref) - db) <= 1e-6);
  }
  auto est = AtSdr(ref, 20.0, 3);
  for (double& v : est) v *= -3.7;
  CHECK(std::abs(SiSdr(est, ref) - 20.0) <= 1e-6);
  CHECK(SiSdr(ref, ref) == kDbCap);
  auto ortho = AtSdr(ref, 0.0, 4);
  for (std::size_t i = 0; i < ref.size(); ++i) ortho[i] -= ref[i];
  CHECK(SiSdr(ortho, ref) == -kDbCap);
  CHECK_THROWS_AS(SiSdr(ref, std::vector<double>(16000, 0.0)), Error);
  CHECK_THROWS_AS(SiSdr(std::vector<double>(10, 1.0), ref), Error);
}

TEST_CASE("capped dB") {
  CHECK(CappedDb(100.0, 1.0) == doctest::Approx(20.0));
  CHECK(CappedDb(1.0, 0.0) == kDbCap);
  CHECK(CappedDb(0.0, 1.0) == -kDbCap);
  CHECK(CappedDb(0.0, 0.0) == 0.0);
  CHECK(CappedDb(1e12, 1.0) == kDbCap);
  CHECK(CappedDb(1.0, 1e12) == -kDbCap);
}

TEST_CASE("delta SNR") {
  const auto t = testing::RandomSignal(4000, 5);
  const auto n = testing::RandomSignal(4000, 6, 0.3);
  std::vector<double> half(n);
  for (double& v : half) v /= std::sqrt(2.0);
  CHECK(DeltaSnr(t, n, t, half) == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK(std::abs(DeltaSnr(t, n, t, half) - 3.0103) < 1e-4);
  CHECK(DeltaSnr(t, half, t, n) == doctest::Approx(-DeltaSnr(t, n, t, half)));
  CHECK(DeltaSnr(t, n, t, n) == 0.0);
}

// Dense least-squares projection onto delayed copies of the references.
double OracleSir(const std::vector<double>& est, const std::vector<double>& s,
                 const std::vector<double>& i, int len) {
  const int n = static_cast<int>(est.size());
  const int rows = n + len - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, 2 * len);
  for (int l = 0; l < len; ++l) {
    for (int k = 0; k < n; ++k) {
      a(k + l, l) = s[k];
      a(k + l, len + l) = i[k];
    }
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
  for (int k = 0; k < n; ++k) y(k) = est[k];
  const Eigen::MatrixXd as = a.leftCols(len);
  const Eigen::VectorXd ps = as * as.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd pj = a * a.colPivHouseholderQr().solve(y);
  return 10.0 * std::log10(ps.squaredNorm() / (pj - ps).squaredNorm());
}

TEST_CASE("BSS SIR agrees with a dense projection") {
  const auto s = testing::RandomSignal(400, 7);
  const auto i = testing::RandomSignal(400, 8);
  std::vector<double> est(400);
  // Filtered target plus delayed, filtered interference.
  for (int k = 0; k < 400; ++k) {
    est[k] = 0.8 * s[k] + (k >= 2 ? 0.3 * s[k - 2] : 0.0) + (k >= 3 ? 0.2 * i[k - 3] : 0.0) +
             (k >= 5 ? -0.05 * i[k - 5] : 0.0);
  }
  for (int len : {1, 4, 8}) {
    const BssSirResult r = BssSir(est, s, i, len, Exec::kSerial);
    CHECK(std::abs(r.sir_db - OracleSir(est, s, i, len)) <= 1e-4);
    CHECK(BssSir(est, s, i, len, Exec::kParallel).sir_db == r.sir_db);
  }
}

TEST_CASE("BSS SIR on independent white references") {
  const auto s = testing::RandomSignal(160000, 9);
  const auto i = testing::RandomSignal(160000, 10);
  std::vector<double> est(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) est[k] = s[k] + 0.1 * i[k];
  CHECK(std::abs(BssSir(est, s, i).sir_db - 20.0) <= 0.5);
  CHECK(BssSir(i, s, i).sir_db <= -20.0);
  CHECK(BssSir(s, s, i).sir_db == kDbCap);
}

TEST_CASE("BSS SIR falls as interference grows") {
  const auto s = SynthesizeSpeech(11, {.seconds = 4.0});
  const auto i = SynthesizeSpeech(12, {.seconds = 4.0});
  std::vector<double> est(s.size());
  double prev = INFINITY;
  for (double g : {0.01, 0.05, 0.2, 0.6, 2.0}) {
    for (std::size_t k = 0; k < s.size(); ++k) est[k] = s[k] + g * i[k];
    const double sir = BssSir(est, s, i, 64).sir_db;
    CHECK(sir < prev);
    prev = sir;
  }
  CHECK_THROWS_AS(BssSir(est, s, std::vector<double>(s.size(), 0.0)), Error);
  CHECK_THROWS_AS(BssSir(std::vector<double>(3, 0.0), s, i), Error);
}

struct ShadowFixture {
  FilterBank bank;
  StftConfig cfg;
  std::vector<std::vector<double>> a, b;
  int frames = 0;

  ShadowFixture() {
    const double nulls[] = {kPi / 2, 2 * kPi / 3, 5 * kPi / 6, kPi};
    bank = DesignDmaBank(ArrayGeometry{}, FrequencyGrid{}, 0.0, nulls);
    for (int m = 0; m < 8; ++m) {
      a.push_back(testing::RandomSignal(3000, 20 + m));
      b.push_back(testing::RandomSignal(3000, 40 + m));
    }
    frames = NumFrames(3000, cfg);
  }

  WeightTrajectory Random(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    WeightTrajectory w(frames, 257, 4);
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < 257; ++k) {
        double s = 0.0;
        for (int p = 0; p < 4; ++p) s += (w.at(t, k, p) = u(rng));
        for (int p = 0; p < 4; ++p) w.at(t, k, p) /= s;
      }
    }
    return w;
  }
};

TEST_CASE("shadow processing is linear in the input") {
  ShadowFixture f;
  const WeightTrajectory w = f.Random(1);
  std::vector<std::vector<double>> sum(8, std::vector<double>(3000));
  for (int m = 0; m < 8; ++m) {
    for (int n = 0; n < 3000; ++n) sum[m][n] = f.a[m][n] + 2.5 * f.b[m][n];
  }
  const auto ya = ShadowProcess(f.bank, w, f.a, f.cfg);
  const auto yb = ShadowProcess(f.bank, w, f.b, f.cfg);
  const auto ys = ShadowProcess(f.bank, w, sum, f.cfg);
  std::vector<double> lin(3000);
  for (int n = 0; n < 3000; ++n) lin[n] = ya[n] + 2.5 * yb[n];
  CHECK(testing::RelL2(ys, lin, 0, 3000) <= 1e-8);
  CHECK(ShadowProcess(f.bank, w, f.a, f.cfg, Exec::kSerial) == ya);
}

TEST_CASE("shadow processing with one-hot and uniform weights") {
  ShadowFixture f;
  const auto spec = AnalyzeMultichannel(f.a, f.cfg);
  const auto beams = ApplyBank(f.bank, spec);
  WeightTrajectory one(f.frames, 257, 4), uni(f.frames, 257, 4);
  for (int t = 0; t < f.frames; ++t) {
    for (int k = 0; k < 257; ++k) {
      one.at(t, k, 2) = 1.0;
      for (int p = 0; p < 4; ++p) uni.at(t, k, p) = 0.25;
    }
  }
  const auto y2 = SynthesizeAligned(beams[2], 3000);
  CHECK(testing::RelL2(ShadowProcess(f.bank, one, f.a, f.cfg), y2, 0, 3000) <= 1e-12);
  std::vector<double> mean(3000, 0.0);
  for (const auto& b : beams) {
    const auto y = SynthesizeAligned(b, 3000);
    for (int n = 0; n < 3000; ++n) mean[n] += 0.25 * y[n];
  }
  CHECK(testing::RelL2(ShadowProcess(f.bank, uni, f.a, f.cfg), mean, 0, 3000) <= 1e-12);
  WeightTrajectory wrong(f.frames + 1, 257, 4);
  CHECK_THROWS_AS(ShadowProcess(f.bank, wrong, f.a, f.cfg), Error);
}

TEST_CASE("report serialisation") {
  MetricReport r{"DMA-II", 0.3, 25.0, 4.5, 7.25, 1.5, 12.0};
  const auto j = nlohmann::json::parse(MetricReportsToJson({r}));
  CHECK(j["db_cap"] == kDbCap);
  CHECK(j["reports"][0]["method"] == "DMA-II");
  CHECK(j["reports"][0]["sir_db"] == 12.0);
  CHECK(j["reports"][0]["delta_si_sdr_db"] == 1.5);
  const std::string csv = SirCurveToCsv({{90.0, 3.25, 2}, {100.0, -1.5, 2}});
  CHECK(csv == "angle_deg,sir_db,n_trials\n90.0,3.250000,2\n100.0,-1.500000,2\n");
}

}  // namespace
}  // namespace beamfusion
