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

#include "beamfusion/kernels.h"

#include <algorithm>
#include <string>

#include "beamfusion/fft.h"
#include "beamfusion/stft.h"

namespace beamfusion::kernels {

void Beamform(const CMatrix& coeffs, std::span<const CMatrix* const> channels,
              CMatrix& out, Exec exec) {
  const int mics = static_cast<int>(coeffs.cols());
  const int bins = static_cast<int>(coeffs.rows());
  if (static_cast<int>(channels.size()) != mics) {
    throw Error("beamformer expects " + std::to_string(mics) +
                " channels, got " + std::to_string(channels.size()));
  }
  const int frames = static_cast<int>(channels[0]->rows());
  for (const CMatrix* ch : channels) {
    if (ch->rows() != frames || ch->cols() != bins) {
      throw Error("channel spectrogram shape does not match the filter grid");
    }
  }
  out.resize(frames, bins);
  const CMatrix conj_coeffs = coeffs.conjugate();
  const auto row = [&](int t) {
    for (int k = 0; k < bins; ++k) {
      Complex acc(0.0, 0.0);
      for (int m = 0; m < mics; ++m) acc += conj_coeffs(k, m) * (*channels[m])(t, k);
      out(t, k) = acc;
    }
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < frames; ++t) row(t);
  } else {
    for (int t = 0; t < frames; ++t) row(t);
  }
}

void FuseWeighted(std::span<const CMatrix* const> beams,
                  std::span<const double> weights, CMatrix& out, Exec exec) {
  if (beams.empty()) throw Error("no beams to fuse");
  const int num_beams = static_cast<int>(beams.size());
  const int frames = static_cast<int>(beams[0]->rows());
  const int bins = static_cast<int>(beams[0]->cols());
  for (const CMatrix* b : beams) {
    if (b->rows() != frames || b->cols() != bins) {
      throw Error("beam spectrograms have inconsistent shapes");
    }
  }
  if (weights.size() != static_cast<std::size_t>(frames) * bins * num_beams) {
    throw Error("weight trajectory does not match the beam shapes");
  }
  out.resize(frames, bins);
  const auto row = [&](int t) {
    for (int k = 0; k < bins; ++k) {
      const double* w = weights.data() + (static_cast<std::size_t>(t) * bins + k) * num_beams;
      Complex acc(0.0, 0.0);
      for (int p = 0; p < num_beams; ++p) acc += w[p] * (*beams[p])(t, k);
      out(t, k) = acc;
    }
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < frames; ++t) row(t);
  } else {
    for (int t = 0; t < frames; ++t) row(t);
  }
}

std::vector<double> CrossCorrelate(std::span<const double> x,
                                   std::span<const double> y, int num_lags,
                                   Exec exec) {
  std::vector<double> r(std::max(num_lags, 0), 0.0);
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  const auto lag_sum = [&](int lag) {
    // n ranges over indices where both x[n] and y[n - lag] exist.
    const std::size_t begin = static_cast<std::size_t>(lag);
    const std::size_t end = std::min(nx, ny + lag);
    double acc = 0.0;
    for (std::size_t n = begin; n < end; ++n) acc += x[n] * y[n - lag];
    r[lag] = acc;
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int lag = 0; lag < num_lags; ++lag) lag_sum(lag);
  } else {
    for (int lag = 0; lag < num_lags; ++lag) lag_sum(lag);
  }
  return r;
}

std::vector<double> ConvolveDirect(std::span<const double> x,
                                   std::span<const double> h,
                                   std::size_t out_len, Exec exec) {
  std::vector<double> y(out_len, 0.0);
  if (x.empty() || h.empty()) return y;
  const long long nx = static_cast<long long>(x.size());
  const long long nh = static_cast<long long>(h.size());
  const auto sample = [&](long long n) {
    const long long k_lo = std::max(0LL, n - nx + 1);
    const long long k_hi = std::min(nh - 1, n);
    double acc = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  };
  const long long n_out = static_cast<long long>(out_len);
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (long long n = 0; n < n_out; ++n) sample(n);
  } else {
    for (long long n = 0; n < n_out; ++n) sample(n);
  }
  return y;
}

std::vector<double> ConvolveFft(std::span<const double> x,
                                std::span<const double> h,
                                std::size_t out_len) {
  std::vector<double> y(out_len, 0.0);
  if (x.empty() || h.empty() || out_len == 0) return y;
  const std::size_t full = x.size() + h.size() - 1;
  const std::size_t needed = std::min(full, out_len);
  // Block length: at least the filter length, rounded up to a power of two.
  std::size_t nfft = 64;
  while (nfft < 2 * h.size()) nfft <<= 1;
  const std::size_t block = nfft - h.size() + 1;
  const auto fft = GetRealFft(static_cast<int>(nfft));
  const std::size_t bins = nfft / 2 + 1;

  std::vector<double> buf(nfft, 0.0);
  std::vector<Complex> h_spec(bins), x_spec(bins);
  std::copy(h.begin(), h.end(), buf.begin());
  fft->Forward(buf.data(), h_spec.data());
  const double scale = 1.0 / static_cast<double>(nfft);

  for (std::size_t start = 0; start < x.size() && start < needed; start += block) {
    const std::size_t len = std::min(block, x.size() - start);
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy(x.begin() + start, x.begin() + start + len, buf.begin());
    fft->Forward(buf.data(), x_spec.data());
    for (std::size_t k = 0; k < bins; ++k) x_spec[k] *= h_spec[k];
    fft->Inverse(x_spec.data(), buf.data());
    const std::size_t span_len = std::min(len + h.size() - 1, needed - start);
    for (std::size_t n = 0; n < span_len; ++n) y[start + n] += buf[n] * scale;
  }
  return y;
}

}  // namespace beamfusion::kernels
