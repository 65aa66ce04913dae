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

#include "beamfusion/erb.h"

#include <cmath>
#include <string>

namespace beamfusion {

double ErbRate(double freq) { return 21.4 * std::log10(1.0 + 0.00437 * freq); }

ErbBank MakeErbBank(int num_bins, int num_bands, double sample_rate, int knee) {
  if (num_bins < 2 || !(sample_rate > 0.0)) throw Error("invalid ERB grid");
  if (knee < 0 || knee >= num_bins) throw Error("ERB knee outside the bin range");
  if (num_bands >= num_bins) {
    throw Error("ERB band count must be smaller than the bin count");
  }
  const int upper_bands = num_bands - knee;
  if (upper_bands < 2) {
    throw Error("ERB band count " + std::to_string(num_bands) +
                " too small to cover the knee at " + std::to_string(knee));
  }
  const double bin_hz = sample_rate / (2.0 * (num_bins - 1));
  const double lo = ErbRate(knee * bin_hz);
  const double hi = ErbRate((num_bins - 1) * bin_hz);
  const double spacing = (hi - lo) / (upper_bands - 1);

  ErbBank bank;
  bank.knee = knee;
  bank.analysis = RMatrix::Zero(num_bands, num_bins);
  bank.band_of_bin.assign(num_bins, 0);
  for (int k = 0; k < knee; ++k) {
    bank.analysis(k, k) = 1.0;
    bank.band_of_bin[k] = k;
  }
  for (int k = knee; k < num_bins; ++k) {
    const double e = ErbRate(k * bin_hz);
    double best = -1.0;
    for (int j = 0; j < upper_bands; ++j) {
      const double center = lo + j * spacing;
      const double w = std::max(0.0, 1.0 - std::abs(e - center) / spacing);
      bank.analysis(knee + j, k) = w;
      if (w > best) {
        best = w;
        bank.band_of_bin[k] = knee + j;
      }
    }
  }
  for (int b = 0; b < num_bands; ++b) {
    const double sum = bank.analysis.row(b).sum();
    if (!(sum > 0.0)) {
      throw Error("ERB band " + std::to_string(b) + " covers no bins; use fewer bands");
    }
    bank.analysis.row(b) /= sum;
  }
  return bank;
}

}  // namespace beamfusion
