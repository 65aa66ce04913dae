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

#ifndef BEAMFUSION_DATASET_H_
#define BEAMFUSION_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "beamfusion/roomsim.h"
#include "beamfusion/stft.h"

namespace beamfusion {

// Scenario as JSON. Field names follow the struct; trajectories are
// {"type": "static", "position": [x, y, z]} or {"type": "circular_hop",
// "center", "radius", "start_az", "stop_az", "step", "interval"}. Missing
// fields keep their defaults; "snr_db": null means no sensor noise.
Scenario ParseScenarioJson(const std::string& text);
std::string ScenarioToJson(const Scenario& scn);
std::string TrajectoryToJson(const SourceTrajectory& traj);

struct DatasetConfig {
  Scenario base;  // room size, array, target placement
  double clip_seconds = 10.0;
  double t60_min = 0.2, t60_max = 0.8;
  double snr_min = 20.0, snr_max = 40.0;
  CircularHopTrajectory interferer;  // centered on the array when radius > 0
  std::vector<double> nulls_deg{90.0, 120.0, 150.0, 180.0};
  double theta_s_deg = 0.0;
  bool include_mwng = false;
  StftConfig stft;
  // Directory of mono WAVs at the array sample rate. Empty selects the
  // built-in speech synthesizer.
  std::string source_dir;
  bool write_components = true;
};

// Writes <out>/manifest.jsonl and, when count > 0, <out>/filters.bfb and
// <out>/samples/<id>/{mix,beams,ref,target,interference,noise}.wav plus
// meta.json. Sample i draws everything from DeriveSeed(seed, i), so output
// does not depend on how samples are spread over threads.
void GenerateDataset(const DatasetConfig& config, int count, std::uint64_t seed,
                     const std::string& out_dir);

}  // namespace beamfusion

#endif  // BEAMFUSION_DATASET_H_
