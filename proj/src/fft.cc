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

#include "beamfusion/fft.h"

#include <fftw3.h>

#include <mutex>
#include <string>
#include <vector>

namespace beamfusion {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct RealFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~Plans() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (inverse != nullptr) fftw_destroy_plan(inverse);
  }
};

RealFft::RealFft(int size) : size_(size), plans_(std::make_unique<Plans>()) {
  if (size < 2) throw Error("FFT size must be >= 2, got " + std::to_string(size));
  std::vector<double> re(size);
  std::vector<Complex> cx(size / 2 + 1);
  auto* cx_ptr = reinterpret_cast<fftw_complex*>(cx.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  plans_->forward = fftw_plan_dft_r2c_1d(size, re.data(), cx_ptr, flags);
  // c2r transforms cannot preserve their input in general, so Inverse copies.
  plans_->inverse = fftw_plan_dft_c2r_1d(size, cx_ptr, re.data(),
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plans_->forward == nullptr || plans_->inverse == nullptr) {
    throw Error("FFTW failed to build a plan of size " + std::to_string(size));
  }
}

RealFft::~RealFft() = default;

RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::Forward(const double* in, Complex* out) const {
  fftw_execute_dft_r2c(plans_->forward, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::Inverse(const Complex* in, double* out) const {
  std::vector<Complex> scratch(in, in + num_bins());
  fftw_execute_dft_c2r(plans_->inverse,
                       reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

}  // namespace beamfusion
