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

#include <random>

#include "beamfusion/kernels.h"
#include "test_util.h"

namespace beamfusion {
namespace {

CMatrix RandomComplex(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = Complex(g(rng), g(rng));
  }
  return m;
}

TEST_CASE("beamform kernel: serial and parallel agree with the definition") {
  const CMatrix coeffs = RandomComplex(33, 5, 1);
  std::vector<CMatrix> ch;
  for (int m = 0; m < 5; ++m) ch.push_back(RandomComplex(17, 33, 2 + m));
  std::vector<const CMatrix*> ptrs;
  for (const auto& c : ch) ptrs.push_back(&c);
  CMatrix serial, parallel;
  kernels::Beamform(coeffs, ptrs, serial, Exec::kSerial);
  kernels::Beamform(coeffs, ptrs, parallel, Exec::kParallel);
  CHECK(serial == parallel);
  for (int t = 0; t < 17; t += 4) {
    for (int k = 0; k < 33; k += 5) {
      Complex ref = 0.0;
      for (int m = 0; m < 5; ++m) ref += std::conj(coeffs(k, m)) * ch[m](t, k);
      CHECK(std::abs(serial(t, k) - ref) <= 1e-12);
    }
  }
  ptrs.pop_back();
  CHECK_THROWS_AS(kernels::Beamform(coeffs, ptrs, serial, Exec::kSerial), Error);
}

TEST_CASE("weighted fusion kernel") {
  std::vector<CMatrix> beams;
  for (int p = 0; p < 3; ++p) beams.push_back(RandomComplex(9, 11, 10 + p));
  std::vector<const CMatrix*> ptrs;
  for (const auto& b : beams) ptrs.push_back(&b);
  const auto w = testing::RandomSignal(9 * 11 * 3, 13);
  CMatrix serial, parallel;
  kernels::FuseWeighted(ptrs, w, serial, Exec::kSerial);
  kernels::FuseWeighted(ptrs, w, parallel, Exec::kParallel);
  CHECK(serial == parallel);
  const Complex ref = w[(4 * 11 + 7) * 3 + 0] * beams[0](4, 7) +
                      w[(4 * 11 + 7) * 3 + 1] * beams[1](4, 7) +
                      w[(4 * 11 + 7) * 3 + 2] * beams[2](4, 7);
  CHECK(std::abs(serial(4, 7) - ref) <= 1e-12);
  CHECK_THROWS_AS(kernels::FuseWeighted(ptrs, std::vector<double>(5), serial, Exec::kSerial),
                  Error);
}

TEST_CASE("cross-correlation against the definition") {
  const auto x = testing::RandomSignal(300, 20);
  const auto y = testing::RandomSignal(250, 21);
  const auto r = kernels::CrossCorrelate(x, y, 40, Exec::kSerial);
  CHECK(kernels::CrossCorrelate(x, y, 40, Exec::kParallel) == r);
  for (int l = 0; l < 40; ++l) {
    double ref = 0.0;
    for (int n = 0; n < 300; ++n) {
      if (n - l >= 0 && n - l < 250) ref += x[n] * y[n - l];
    }
    CHECK(std::abs(r[l] - ref) <= 1e-12);
  }
}

TEST_CASE("FFT and direct convolution agree") {
  for (std::size_t nh : {1u, 7u, 64u, 513u, 3000u}) {
    const auto x = testing::RandomSignal(5000, 30 + nh);
    const auto h = testing::RandomSignal(nh, 31 + nh);
    const std::size_t full = x.size() + nh - 1;
    const auto direct = kernels::ConvolveDirect(x, h, full, Exec::kSerial);
    CHECK(kernels::ConvolveDirect(x, h, full, Exec::kParallel) == direct);
    const auto fast = kernels::ConvolveFft(x, h, full + 10);
    CHECK(testing::RelL2(fast, direct, 0, full) <= 1e-12);
    for (std::size_t n = full; n < full + 10; ++n) CHECK(fast[n] == 0.0);
    const auto cut = kernels::ConvolveFft(x, h, 1234);
    CHECK(testing::RelL2(cut, direct, 0, 1234) <= 1e-12);
  }
  // Spot check of the definition.
  const std::vector<double> x{1.0, 2.0, 3.0}, h{1.0, -1.0};
  CHECK(kernels::ConvolveDirect(x, h, 4, Exec::kSerial) == std::vector<double>{1.0, 1.0, 1.0, -3.0});
}

}  // namespace
}  // namespace beamfusion
