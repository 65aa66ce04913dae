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

#include "beamfusion/acc.h"

#include <cmath>
#include <string>

namespace beamfusion {

AccState::AccState(int beams, int bins, const AccOptions& options)
    : beams_(beams), bins_(bins), options_(options) {
  if (beams < 2) throw Error("ACC needs at least 2 beams");
  if (bins < 1) throw Error("ACC needs at least 1 frequency bin");
  if (!(options.step_size > 0.0) || !std::isfinite(options.step_size)) {
    throw Error("ACC step size must be positive");
  }
  if (!(options.weight_floor > 0.0) || !(options.weight_floor < 1.0 / beams)) {
    throw Error("ACC weight floor must lie in (0, 1/P)");
  }
  alpha_ = RMatrix::Constant(bins, beams, 1.0 / beams);
}

void AccState::StepBin(int k, const CMatrix& z, std::span<Complex> fused,
                       RMatrix* weights_used) {
  Complex out(0.0, 0.0);
  double power = 1e-12;
  for (int p = 0; p < beams_; ++p) {
    out += alpha_(k, p) * z(k, p);
    power += std::norm(z(k, p));
  }
  fused[k] = out;
  if (weights_used != nullptr) weights_used->row(k) = alpha_.row(k);

  double sum = 0.0;
  for (int p = 0; p < beams_; ++p) {
    const double grad = 2.0 * (std::conj(out) * z(k, p)).real();
    alpha_(k, p) *= std::exp(-options_.step_size * grad / power);
    sum += alpha_(k, p);
  }
  double clamped_sum = 0.0;
  for (int p = 0; p < beams_; ++p) {
    alpha_(k, p) = std::max(alpha_(k, p) / sum, options_.weight_floor);
    clamped_sum += alpha_(k, p);
  }
  for (int p = 0; p < beams_; ++p) alpha_(k, p) /= clamped_sum;
}

void AccState::Step(const CMatrix& beam_frame, std::span<Complex> fused,
                    RMatrix* weights_used, Exec exec) {
  if (beam_frame.rows() != bins_ || beam_frame.cols() != beams_) {
    throw Error("ACC frame must be " + std::to_string(bins_) + " x " +
                std::to_string(beams_));
  }
  if (fused.size() != static_cast<std::size_t>(bins_)) {
    throw Error("ACC fused output has the wrong size");
  }
  if (!beam_frame.allFinite()) throw Error("ACC input contains non-finite values");
  if (weights_used != nullptr) weights_used->resize(bins_, beams_);
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < bins_; ++k) StepBin(k, beam_frame, fused, weights_used);
  } else {
    for (int k = 0; k < bins_; ++k) StepBin(k, beam_frame, fused, weights_used);
  }
}

AccResult RunAcc(const std::vector<Spectrogram>& beams,
                 const AccOptions& options, Exec exec) {
  if (beams.size() < 2) throw Error("ACC needs at least 2 beams");
  const int frames = beams[0].frames();
  const int bins = beams[0].bins();
  const int num_beams = static_cast<int>(beams.size());
  for (const Spectrogram& b : beams) {
    if (b.frames() != frames || b.bins() != bins) {
      throw Error("beam spectrograms have inconsistent shapes");
    }
  }
  AccState state(num_beams, bins, options);
  AccResult result;
  result.fused.config = beams[0].config;
  result.fused.data.resize(frames, bins);
  result.trajectory = WeightTrajectory(frames, bins, num_beams);

  CMatrix frame(bins, num_beams);
  RMatrix used;
  std::vector<Complex> fused(bins);
  for (int t = 0; t < frames; ++t) {
    for (int p = 0; p < num_beams; ++p) frame.col(p) = beams[p].data.row(t).transpose();
    state.Step(frame, fused, &used, exec);
    for (int k = 0; k < bins; ++k) {
      result.fused.data(t, k) = fused[k];
      for (int p = 0; p < num_beams; ++p) result.trajectory.at(t, k, p) = used(k, p);
    }
  }
  return result;
}

}  // namespace beamfusion
