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

#include "beamfusion/array.h"

namespace beamfusion {
namespace {

TEST_CASE("steering vector at broadside is all ones") {
  ArrayGeometry g;
  for (double f : {0.0, 250.0, 1000.0, 8000.0}) {
    const auto sv = ComputeSteeringVector(g, f, DegToRad(90.0));
    REQUIRE(sv.entries.size() == 8);
    for (const auto& e : sv.entries) CHECK(std::abs(e - Complex(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("quarter-wavelength two-element endfire gives [1, -j]") {
  ArrayGeometry g;
  g.num_mics = 2;
  g.sample_rate = 48000.0;  // keeps c / (4 delta) = 8575 Hz below Nyquist
  const double f = g.sound_speed / (4.0 * g.spacing);
  const auto sv = ComputeSteeringVector(g, f, 0.0);
  CHECK(std::abs(sv.entries[0] - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(sv.entries[1] - Complex(0.0, -1.0)) < 1e-12);
}

TEST_CASE("steering vector matches scalar phase evaluation") {
  ArrayGeometry g;
  const double f = 1000.0, theta = DegToRad(45.0);
  const auto sv = ComputeSteeringVector(g, f, theta);
  for (int m = 0; m < g.num_mics; ++m) {
    const double phase = -m * 2.0 * M_PI * f * (0.01 / 343.0) * std::cos(M_PI / 4.0);
    const Complex expected(std::cos(phase), std::sin(phase));
    CHECK(std::abs(sv.entries[m] - expected) < 1e-12);
  }
}

TEST_CASE("steering entries have unit modulus and start at exactly 1") {
  ArrayGeometry g;
  FrequencyGrid grid;
  for (double deg = 0.0; deg <= 360.0; deg += 15.0) {
    const CMatrix s = SteeringMatrix(g, grid, DegToRad(deg));
    for (int k = 0; k < grid.num_bins(); ++k) {
      CHECK(s(k, 0) == Complex(1.0, 0.0));
      for (int m = 0; m < g.num_mics; ++m) CHECK(std::abs(std::abs(s(k, m)) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("steering matrix rows equal per-bin vectors; DC row is ones") {
  ArrayGeometry g;
  FrequencyGrid grid;
  const double theta = DegToRad(33.0);
  const CMatrix s = SteeringMatrix(g, grid, theta);
  REQUIRE(s.rows() == 257);
  REQUIRE(s.cols() == 8);
  for (int m = 0; m < 8; ++m) CHECK(s(0, m) == Complex(1.0, 0.0));
  for (int k : {1, 17, 128, 256}) {
    const auto sv = ComputeSteeringVector(g, grid.bin_freq(k), theta);
    for (int m = 0; m < 8; ++m) CHECK(s(k, m) == sv.entries[m]);
  }
}

TEST_CASE("endfire and backfire rows are complex conjugates") {
  ArrayGeometry g;
  FrequencyGrid grid;
  const CMatrix a = SteeringMatrix(g, grid, 0.0);
  const CMatrix b = SteeringMatrix(g, grid, M_PI);
  CHECK((a - b.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("frequency grid layout") {
  FrequencyGrid grid;
  CHECK(grid.num_bins() == 257);
  CHECK(grid.bin_freq(0) == 0.0);
  CHECK(grid.bin_freq(256) == 8000.0);
  grid.nfft = 511;
  CHECK_THROWS_AS(grid.Validate(), Error);
}

TEST_CASE("steering rejects out-of-range inputs") {
  ArrayGeometry g;
  CHECK_THROWS_AS(ComputeSteeringVector(g, 8000.5, 0.0), Error);
  CHECK_THROWS_AS(ComputeSteeringVector(g, -1.0, 0.0), Error);
  CHECK_THROWS_AS(ComputeSteeringVector(g, 100.0, std::numeric_limits<double>::quiet_NaN()), Error);
  ArrayGeometry bad = g;
  bad.num_mics = 1;
  CHECK_THROWS_AS(bad.Validate(), Error);
  bad = g;
  bad.spacing = 0.0;
  CHECK_THROWS_AS(bad.Validate(), Error);
}

}  // namespace
}  // namespace beamfusion
