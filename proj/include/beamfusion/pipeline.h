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

#ifndef BEAMFUSION_PIPELINE_H_
#define BEAMFUSION_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "beamfusion/acc.h"
#include "beamfusion/beamformer.h"
#include "beamfusion/fusion.h"
#include "beamfusion/metrics.h"
#include "beamfusion/roomsim.h"
#include "beamfusion/stft.h"
#include "beamfusion/weights.h"

namespace beamfusion {

// How beam outputs are combined: a single fixed beam, adaptive convex
// combination, or the neural fusion network.
struct Mode {
  enum class Kind { kFixed, kAcc, kNeural };
  Kind kind = Kind::kFixed;
  int beam = 0;  // kFixed only

  // "fixed:<p>", "acc" or "neural".
  static Mode Parse(const std::string& text);
  std::string ToString() const;
  bool operator==(const Mode&) const = default;
};

struct EnhanceOptions {
  StftConfig stft;
  AccOptions acc;
  const ModelParams* model = nullptr;  // required for neural mode
  Exec exec = Exec::kParallel;
};

struct EnhanceOutput {
  std::vector<double> signal;      // aligned with the input
  WeightTrajectory weights;        // T x F x P; one-hot for fixed mode
  std::vector<Spectrogram> beams;
  Spectrogram fused;
};

EnhanceOutput EnhanceMultichannel(const FilterBank& bank,
                                  const std::vector<std::vector<double>>& mics,
                                  const Mode& mode, const EnhanceOptions& opts);

// Label used in reports: the filter label for fixed modes, "ACC", "Neural".
std::string MethodName(const FilterBank& bank, const Mode& mode);

// Enhances the mixture with every mode, then shadow-processes the target and
// the interference-plus-noise components with the weights found on the
// mixture. SIR references are the reverberant target and interference at
// mic 0.
std::vector<MetricReport> EvaluateScenario(const FilterBank& bank,
                                           const ScenarioAudio& audio,
                                           const Scenario& scenario,
                                           const std::vector<Mode>& modes,
                                           const EnhanceOptions& opts,
                                           int bss_filter_len = 512);

struct SirCurveOptions {
  double t60 = 0.24;
  double clip_seconds = 3.0;
  double start_deg = 90.0;
  double stop_deg = 180.0;
  double step_deg = 10.0;
  int trials = 1;
  double snr_db = 30.0;
  bool anechoic = false;
  std::uint64_t seed = 0;
  int bss_filter_len = 512;
};

// One curve per mode: per angle, the SIR averaged over trials with a static
// interferer at that azimuth and synthetic speech sources.
std::vector<std::vector<SirPoint>> SirVsAngle(const FilterBank& bank,
                                              const Scenario& base,
                                              const std::vector<Mode>& modes,
                                              const EnhanceOptions& opts,
                                              const SirCurveOptions& curve);

}  // namespace beamfusion

#endif  // BEAMFUSION_PIPELINE_H_
