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

#include "beamfusion/array.h"

#include <cmath>
#include <string>

namespace beamfusion {

void ArrayGeometry::Validate() const {
  if (num_mics < 2) throw Error("array needs at least 2 microphones");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error("microphone spacing must be positive");
  }
  if (!(sound_speed > 0.0) || !std::isfinite(sound_speed)) {
    throw Error("sound speed must be positive");
  }
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error("sample rate must be positive");
  }
}

void FrequencyGrid::Validate() const {
  if (nfft < 2 || nfft % 2 != 0) {
    throw Error("nfft must be even and >= 2, got " + std::to_string(nfft));
  }
  if (!(sample_rate > 0.0)) throw Error("sample rate must be positive");
}

SteeringVector ComputeSteeringVector(const ArrayGeometry& geom, double freq,
                                     double theta) {
  geom.Validate();
  if (!std::isfinite(theta)) throw Error("steering angle must be finite");
  if (!(freq >= 0.0) || freq > geom.sample_rate / 2.0) {
    throw Error("steering frequency outside [0, fs/2]: " +
                std::to_string(freq));
  }
  SteeringVector sv;
  sv.theta = theta;
  sv.freq = freq;
  sv.entries.resize(geom.num_mics);
  const double phase_step = 2.0 * kPi * freq * geom.tau0() * std::cos(theta);
  sv.entries[0] = Complex(1.0, 0.0);
  for (int m = 1; m < geom.num_mics; ++m) {
    sv.entries[m] = std::polar(1.0, -m * phase_step);
  }
  return sv;
}

CMatrix SteeringMatrix(const ArrayGeometry& geom, const FrequencyGrid& grid,
                       double theta) {
  grid.Validate();
  if (grid.sample_rate != geom.sample_rate) {
    throw Error("grid and array sample rates differ");
  }
  CMatrix out(grid.num_bins(), geom.num_mics);
  for (int k = 0; k < grid.num_bins(); ++k) {
    const SteeringVector sv = ComputeSteeringVector(geom, grid.bin_freq(k), theta);
    for (int m = 0; m < geom.num_mics; ++m) out(k, m) = sv.entries[m];
  }
  return out;
}

}  // namespace beamfusion
