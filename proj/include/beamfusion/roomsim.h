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

#ifndef BEAMFUSION_ROOMSIM_H_
#define BEAMFUSION_ROOMSIM_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "beamfusion/array.h"
#include "beamfusion/common.h"

namespace beamfusion {

using Position = std::array<double, 3>;  // meters

// Shoebox room with one uniform wall absorption derived from T60.
struct RoomConfig {
  Position dims{8.0, 6.0, 3.0};
  double t60 = 0.3;  // seconds; 0 means anechoic
  double sample_rate = 16000.0;
  double sound_speed = 343.0;
  // Reflection-order override. 0 keeps only the direct path.
  std::optional<int> max_order;

  void Validate() const;
  bool anechoic() const { return t60 == 0.0 || (max_order && *max_order == 0); }
  double Volume() const { return dims[0] * dims[1] * dims[2]; }
  double Surface() const;
  // Wall absorption used for rendering (1 when anechoic).
  double Absorption() const;
  // Highest reflection count rendered: ceil(c * t60 / (2 * min dimension)) + 1,
  // or the override.
  int MaxOrder() const;
  // ceil(t60 * fs) + 1024 taps.
  std::size_t RirLength() const;
};

// Sabine: alpha = 0.161 V / (S t60), clamped to [1e-4, 1].
double SabineAbsorption(const RoomConfig& room, double t60);
// Inverse of the unclamped Sabine relation.
double SabineT60(const RoomConfig& room, double absorption);

struct Rir {
  std::vector<double> taps;
  double sample_rate = 16000.0;
};

// Allen-Berkley image-source response from `src` to `mic`. Each image adds
// (1 - alpha)^(r / 2) / (4 pi dist) through an 8-tap Hann-windowed sinc
// centered at dist * fs / c, r being its reflection count.
Rir IsmRir(const RoomConfig& room, const Position& src, const Position& mic);

// Responses from one source to several microphones; images are enumerated
// once and the per-microphone accumulation runs under `exec`.
std::vector<Rir> IsmRirs(const RoomConfig& room, const Position& src,
                         std::span<const Position> mics,
                         Exec exec = Exec::kParallel);

// Microphone m sits at center + ((M - 1) / 2 - m) * spacing along x, so
// mic 0 faces azimuth 0 (+x) and steering delays grow with m.
std::vector<Position> MicPositions(const ArrayGeometry& geom,
                                   const Position& center);

// Point at `distance` from `center` in the horizontal plane, azimuth
// counterclockwise from +x.
Position PolarPosition(const Position& center, double distance, double az_deg);

struct StaticTrajectory {
  Position position{};
};

// Source hops along a horizontal circle: azimuth start, start + step, ...
// up to stop, holding each position for `interval` seconds and staying at
// `stop` afterwards.
struct CircularHopTrajectory {
  Position center{};
  double radius = 2.0;
  double start_az = 90.0;  // degrees
  double stop_az = 180.0;
  double step = 10.0;
  double interval = 1.0;  // seconds
};

using SourceTrajectory = std::variant<StaticTrajectory, CircularHopTrajectory>;

// Position held during segment `index`; segments are `interval` long.
Position TrajectoryPosition(const SourceTrajectory& traj, int index);
double TrajectoryInterval(const SourceTrajectory& traj, double signal_seconds);

// Piecewise-stationary rendering: segment k of `signal` is convolved with
// the responses at the k-th trajectory position and all segment outputs are
// summed, tails included. Each output channel has signal.size() samples.
std::vector<std::vector<double>> RenderMoving(std::span<const double> signal,
                                              const SourceTrajectory& traj,
                                              std::span<const Position> mics,
                                              const RoomConfig& room);

struct Scenario {
  RoomConfig room;
  Position array_center{4.0, 2.0, 1.0};
  ArrayGeometry geometry;
  double target_az = 0.0;  // degrees
  double target_distance = 2.0;
  std::vector<SourceTrajectory> interferers;
  double snr_db = 30.0;  // +infinity disables sensor noise
  std::uint64_t seed = 0;

  void Validate() const;
};

// Components are M-channel; mixture = target + interference + noise exactly.
struct ScenarioAudio {
  std::vector<std::vector<double>> mixture;
  std::vector<std::vector<double>> target;
  std::vector<std::vector<double>> interference;
  std::vector<std::vector<double>> noise;
  std::vector<double> reference;  // direct-path target at mic 0
};

ScenarioAudio SynthesizeScenario(const Scenario& scn,
                                 std::span<const double> target_wav,
                                 const std::vector<std::vector<double>>& interferer_wavs);

struct SilenceTrimOptions {
  double max_gap = 0.1;        // seconds
  double frame = 0.01;         // seconds
  double threshold_db = -40.0;  // frame energy relative to the loudest frame
};

// Shortens every run of sub-threshold frames longer than max_gap to max_gap.
std::vector<double> SilenceTrim(std::span<const double> wav, double sample_rate,
                                const SilenceTrimOptions& opts = {});

}  // namespace beamfusion

#endif  // BEAMFUSION_ROOMSIM_H_
