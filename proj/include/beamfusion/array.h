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

#ifndef BEAMFUSION_ARRAY_H_
#define BEAMFUSION_ARRAY_H_

#include <vector>

#include "beamfusion/common.h"

namespace beamfusion {

// Uniform linear array. Microphone m sits at x = m * spacing along the array
// axis; angles are measured from that axis (0 rad = endfire).
struct ArrayGeometry {
  int num_mics = 8;
  double spacing = 0.01;       // meters
  double sound_speed = 343.0;  // meters / second
  double sample_rate = 16000.0;

  // Inter-element delay for a wave arriving from endfire, seconds.
  double tau0() const { return spacing / sound_speed; }

  // Throws Error when any field is out of range.
  void Validate() const;
};

// One-sided DFT grid: bin k sits at k * fs / nfft, k = 0 .. nfft / 2.
struct FrequencyGrid {
  int nfft = 512;
  double sample_rate = 16000.0;

  int num_bins() const { return nfft / 2 + 1; }
  double bin_freq(int k) const { return k * sample_rate / nfft; }
  void Validate() const;
};

struct SteeringVector {
  std::vector<Complex> entries;
  double theta = 0.0;  // radians
  double freq = 0.0;   // hertz
};

// Far-field phase-delay vector: entry m is exp(-j m w tau0 cos(theta)).
SteeringVector ComputeSteeringVector(const ArrayGeometry& geom, double freq,
                                     double theta);

// F x M stack of steering vectors over every bin of `grid`.
CMatrix SteeringMatrix(const ArrayGeometry& geom, const FrequencyGrid& grid,
                       double theta);

}  // namespace beamfusion

#endif  // BEAMFUSION_ARRAY_H_
