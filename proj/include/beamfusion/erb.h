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

#ifndef BEAMFUSION_ERB_H_
#define BEAMFUSION_ERB_H_

#include <vector>

#include "beamfusion/common.h"

namespace beamfusion {

// Frequency compression from F linear bins to F' bands. The first `knee`
// bins pass through one-to-one; the rest are pooled by triangular filters
// spaced uniformly on the ERB-rate scale. Each band's weights sum to 1.
struct ErbBank {
  RMatrix analysis;             // F' x F, non-negative
  std::vector<int> band_of_bin;  // F entries, non-decreasing
  int knee = 0;

  int num_bins() const { return static_cast<int>(analysis.cols()); }
  int num_bands() const { return static_cast<int>(analysis.rows()); }
};

// ERB-rate (in ERBs) of a frequency in hertz.
double ErbRate(double freq);

ErbBank MakeErbBank(int num_bins, int num_bands, double sample_rate,
                    int knee = 32);

}  // namespace beamfusion

#endif  // BEAMFUSION_ERB_H_
