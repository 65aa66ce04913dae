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

#include "beamfusion/weights.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beamfusion/kernels.h"

namespace beamfusion {

double WeightTrajectory::MaxSimplexError() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + beams <= values.size(); i += beams) {
    double sum = 0.0;
    for (int p = 0; p < beams; ++p) sum += values[i + p];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double WeightTrajectory::MinEntry() const {
  double lo = std::numeric_limits<double>::infinity();
  for (double v : values) lo = std::min(lo, v);
  return lo;
}

Spectrogram FuseTrajectory(const std::vector<Spectrogram>& beams,
                           const WeightTrajectory& weights, Exec exec) {
  if (beams.empty()) throw Error("no beams to fuse");
  if (static_cast<int>(beams.size()) != weights.beams ||
      beams[0].frames() != weights.frames || beams[0].bins() != weights.bins) {
    throw Error("weight trajectory shape does not match the beams");
  }
  std::vector<const CMatrix*> ptrs;
  for (const Spectrogram& b : beams) ptrs.push_back(&b.data);
  Spectrogram out;
  out.config = beams[0].config;
  kernels::FuseWeighted(ptrs, weights.values, out.data, exec);
  return out;
}

}  // namespace beamfusion
