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

#ifndef BEAMFUSION_BEAMFORMER_H_
#define BEAMFUSION_BEAMFORMER_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamfusion/array.h"
#include "beamfusion/common.h"
#include "beamfusion/stft.h"

namespace beamfusion {

// A fixed beamformer: one M-vector h(w) per frequency bin, unit response
// toward theta_s and, for differential designs, a null at theta_null.
struct FixedFilter {
  std::string label;
  ArrayGeometry geometry;
  FrequencyGrid grid;
  double theta_s = 0.0;  // radians
  std::optional<double> theta_null;
  CMatrix coeffs;  // F x M
  // Bins where the two-constraint design was unusable and h = d / M was used.
  std::vector<int> fallback_bins;

  bool IsFallback(int bin) const;
};

// Ordered set of P fixed filters sharing geometry, grid and look direction.
struct FilterBank {
  std::vector<FixedFilter> filters;

  int size() const { return static_cast<int>(filters.size()); }
  // Throws Error unless P >= 2 and all members agree on geometry and theta_s.
  void Validate() const;
};

// Maximum white-noise-gain design, h = d_{theta_s} / M.
FixedFilter DesignMwng(const ArrayGeometry& geom, const FrequencyGrid& grid,
                       double theta_s);

// Minimum-norm filter with h^H d_{theta_s} = 1 and h^H d_{theta_null} = 0 at
// every bin. DC (and any bin whose constraint system is singular) falls back
// to h = d_{theta_s} / M.
FixedFilter DesignNullDma(const ArrayGeometry& geom, const FrequencyGrid& grid,
                          double theta_s, double theta_null,
                          std::string label = {});

// Null-steered bank in the order of `nulls`, optionally preceded by MWNG.
// Labels are DMA-I, DMA-II, ... and MWNG.
FilterBank DesignDmaBank(const ArrayGeometry& geom, const FrequencyGrid& grid,
                         double theta_s, std::span<const double> nulls,
                         bool include_mwng = false);

struct Beampattern {
  std::vector<double> thetas;     // radians
  std::vector<double> magnitude;  // |h^H d_theta|
  std::vector<double> magnitude_db;
};

// Response of `filter` at an on-grid frequency.
Beampattern ComputeBeampattern(const FixedFilter& filter, double freq,
                               std::span<const double> thetas);

// |h^H d|^2 / (h^H h) for one bin.
double WhiteNoiseGain(const FixedFilter& filter, int bin, double theta);

// Z(t, k) = h(k)^H y(t, k).
Spectrogram ApplyFilter(const FixedFilter& filter,
                        const MultichannelSpectrogram& input,
                        Exec exec = Exec::kParallel);

std::vector<Spectrogram> ApplyBank(const FilterBank& bank,
                                   const MultichannelSpectrogram& input,
                                   Exec exec = Exec::kParallel);

// Filter-bank file ("BFB1"): tensors "filter/<label>/coeffs" [F, M, 2] as
// float64 and "filter/<label>/theta_null_deg" [1] (NaN when absent).
void SaveFilterBank(const FilterBank& bank, const std::string& path);
FilterBank LoadFilterBank(const std::string& path);

}  // namespace beamfusion

#endif  // BEAMFUSION_BEAMFORMER_H_
