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

#ifndef BEAMFUSION_METRICS_H_
#define BEAMFUSION_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include "beamfusion/beamformer.h"
#include "beamfusion/common.h"
#include "beamfusion/stft.h"
#include "beamfusion/weights.h"

namespace beamfusion {

// Reported decibel values are clamped to [-kDbCap, kDbCap].
inline constexpr double kDbCap = 60.0;

// 10 log10(num / den), clamped to the cap. Zero numerator and denominator
// together give 0.
double CappedDb(double num, double den);
double Energy(std::span<const double> x);

// Runs an M-channel signal through the bank and the given time-varying
// weights and returns the aligned time-domain result. The operation is
// linear in `signal`, so processing components separately and summing
// equals processing their sum.
std::vector<double> ShadowProcess(const FilterBank& bank,
                                  const WeightTrajectory& weights,
                                  const std::vector<std::vector<double>>& signal,
                                  const StftConfig& cfg,
                                  Exec exec = Exec::kParallel);

// Output SNR minus input SNR, each capped.
double DeltaSnr(std::span<const double> target_in, std::span<const double> noise_in,
                std::span<const double> target_out, std::span<const double> noise_out);

// Scale-invariant SDR of `est` against `ref`, capped. Throws on a silent
// reference or length mismatch.
double SiSdr(std::span<const double> est, std::span<const double> ref);

struct BssSirResult {
  double sir_db = 0.0;
  double target_energy = 0.0;
  double interference_energy = 0.0;
};

// Least-squares projection of `est` on `filter_len`-tap filtered copies of
// the target reference (target part) and of both references jointly; the
// difference of the two projections is the interference part.
BssSirResult BssSir(std::span<const double> est, std::span<const double> ref_target,
                    std::span<const double> ref_interf, int filter_len = 512,
                    Exec exec = Exec::kParallel);

struct MetricReport {
  std::string method;
  double t60_s = 0.0;
  double snr_db = 0.0;
  double delta_snr_db = 0.0;
  double si_sdr_db = 0.0;
  double delta_si_sdr_db = 0.0;
  double sir_db = 0.0;
};

std::string MetricReportsToJson(const std::vector<MetricReport>& reports);

struct SirPoint {
  double angle_deg = 0.0;
  double sir_db = 0.0;
  int n_trials = 0;
};

// Header "angle_deg,sir_db,n_trials" plus one row per point.
std::string SirCurveToCsv(const std::vector<SirPoint>& points);

}  // namespace beamfusion

#endif  // BEAMFUSION_METRICS_H_
