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

#ifndef BEAMFUSION_FFT_H_
#define BEAMFUSION_FFT_H_

#include <memory>

#include "beamfusion/common.h"

namespace beamfusion {

// Real-input DFT of a fixed size backed by FFTW. Plans are built once;
// Forward/Inverse are safe to call concurrently from several threads.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  // Unnormalized forward transform; `out` holds size/2 + 1 bins.
  void Forward(const double* in, Complex* out) const;
  // Unnormalized inverse; the caller divides by size(). `in` is not modified.
  void Inverse(const Complex* in, double* out) const;

 private:
  struct Plans;
  int size_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace beamfusion

#endif  // BEAMFUSION_FFT_H_
