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

#ifndef BEAMFUSION_KERNELS_H_
#define BEAMFUSION_KERNELS_H_

// Data-parallel inner loops shared by the signal-processing modules. Every
// kernel takes an Exec argument: kSerial runs the plain reference loop,
// kParallel distributes the same per-item work over OpenMP threads.

#include <cstddef>
#include <span>
#include <vector>

#include "beamfusion/common.h"

namespace beamfusion::kernels {

// out(t, k) = sum_m conj(coeffs(k, m)) * channels[m](t, k).
void Beamform(const CMatrix& coeffs, std::span<const CMatrix* const> channels,
              CMatrix& out, Exec exec);

// out(t, k) = sum_p weights[(t * F + k) * P + p] * beams[p](t, k), with the
// sum taken in increasing p.
void FuseWeighted(std::span<const CMatrix* const> beams,
                  std::span<const double> weights, CMatrix& out, Exec exec);

// r[lag] = sum_n x[n] * y[n - lag] for lag = 0 .. num_lags - 1, treating y as
// zero outside its support.
std::vector<double> CrossCorrelate(std::span<const double> x,
                                   std::span<const double> y, int num_lags,
                                   Exec exec);

// Linear convolution truncated to `out_len` samples, direct summation.
std::vector<double> ConvolveDirect(std::span<const double> x,
                                   std::span<const double> h,
                                   std::size_t out_len, Exec exec);

// Same result as ConvolveDirect (up to rounding) via FFT overlap-add.
std::vector<double> ConvolveFft(std::span<const double> x,
                                std::span<const double> h,
                                std::size_t out_len);

}  // namespace beamfusion::kernels

#endif  // BEAMFUSION_KERNELS_H_
