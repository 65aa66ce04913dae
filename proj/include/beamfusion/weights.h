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

#ifndef BEAMFUSION_WEIGHTS_H_
#define BEAMFUSION_WEIGHTS_H_

#include <cstddef>
#include <vector>

#include "beamfusion/common.h"
#include "beamfusion/stft.h"

namespace beamfusion {

// Per-(frame, bin) combination weights over P beams, stored T x F x P
// row-major. Used for ACC weight trajectories and neural fusion masks.
struct WeightTrajectory {
  int frames = 0;
  int bins = 0;
  int beams = 0;
  std::vector<double> values;

  WeightTrajectory() = default;
  WeightTrajectory(int t, int f, int p)
      : frames(t), bins(f), beams(p),
        values(static_cast<std::size_t>(t) * f * p, 0.0) {}

  std::size_t index(int t, int k, int p) const {
    return (static_cast<std::size_t>(t) * bins + k) * beams + p;
  }
  double& at(int t, int k, int p) { return values[index(t, k, p)]; }
  double at(int t, int k, int p) const { return values[index(t, k, p)]; }

  // Largest |sum_p w - 1| and smallest entry over the whole trajectory.
  double MaxSimplexError() const;
  double MinEntry() const;
};

// S(t, k) = sum_p W_p(t, k) Z_p(t, k).
Spectrogram FuseTrajectory(const std::vector<Spectrogram>& beams,
                           const WeightTrajectory& weights,
                           Exec exec = Exec::kParallel);

}  // namespace beamfusion

#endif  // BEAMFUSION_WEIGHTS_H_
