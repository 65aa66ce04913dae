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

#ifndef BEAMFUSION_ACC_H_
#define BEAMFUSION_ACC_H_

#include <span>
#include <vector>

#include "beamfusion/common.h"
#include "beamfusion/stft.h"
#include "beamfusion/weights.h"

namespace beamfusion {

struct AccOptions {
  double step_size = 0.1;
  double weight_floor = 1e-4;
};

// Adaptive convex combination of P beam outputs. Each bin keeps its own
// weight vector on the probability simplex, updated by an exponentiated
// gradient step on the fused output power |sum_p a_p Z_p|^2. The gradient
// is divided by sum_p |Z_p|^2 so the step size does not depend on level.
class AccState {
 public:
  // Uniform weights 1 / P at every bin.
  AccState(int beams, int bins, const AccOptions& options = {});

  int beams() const { return beams_; }
  int bins() const { return bins_; }
  const RMatrix& weights() const { return alpha_; }  // F x P
  const AccOptions& options() const { return options_; }

  // `beam_frame` is F x P. Writes the fused frame (computed with the current
  // weights) and, if requested, those pre-update weights; then adapts.
  void Step(const CMatrix& beam_frame, std::span<Complex> fused,
            RMatrix* weights_used = nullptr, Exec exec = Exec::kSerial);

 private:
  void StepBin(int k, const CMatrix& beam_frame, std::span<Complex> fused,
               RMatrix* weights_used);

  int beams_;
  int bins_;
  AccOptions options_;
  RMatrix alpha_;
};

struct AccResult {
  Spectrogram fused;
  WeightTrajectory trajectory;  // weights applied at each frame
};

// Runs AccState over all frames in order, starting from uniform weights.
AccResult RunAcc(const std::vector<Spectrogram>& beams,
                 const AccOptions& options = {}, Exec exec = Exec::kParallel);

}  // namespace beamfusion

#endif  // BEAMFUSION_ACC_H_
