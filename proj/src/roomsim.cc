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

#include "beamfusion/roomsim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "beamfusion/kernels.h"

namespace beamfusion {
namespace {

constexpr int kHalfTaps = 4;  // 8-tap fractional delay

struct Image {
  Position pos;
  int reflections;
};

double Distance(const Position& a, const Position& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool StrictlyInside(const RoomConfig& room, const Position& p) {
  for (int d = 0; d < 3; ++d) {
    if (!(p[d] > 0.0 && p[d] < room.dims[d])) return false;
  }
  return true;
}

std::string Describe(const Position& p) {
  return "(" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " +
         std::to_string(p[2]) + ")";
}

constexpr int kTableRes = 2048;  // fractional-delay steps per sample

// Row r holds the 8 taps of sinc(x) * hann(x / 4) at x = i - 3 - r / kTableRes.
const std::vector<double>& PulseTable() {
  static const std::vector<double> table = [] {
    std::vector<double> t((kTableRes + 1) * 2 * kHalfTaps);
    for (int r = 0; r <= kTableRes; ++r) {
      const double frac = static_cast<double>(r) / kTableRes;
      for (int i = 0; i < 2 * kHalfTaps; ++i) {
        const double x = i - (kHalfTaps - 1) - frac;
        const double s = std::abs(x) < 1e-12 ? 1.0 : std::sin(kPi * x) / (kPi * x);
        const double w = 0.5 * (1.0 + std::cos(kPi * x / kHalfTaps));
        t[r * 2 * kHalfTaps + i] = s * w;
      }
    }
    return t;
  }();
  return table;
}

// Adds amp * sinc(n - delay) * hann((n - delay) / 4) for the 8 taps around
// `delay`, interpolating linearly between tabulated fractional delays.
inline void AddFractionalPulse(double* taps, long long len, const double* table,
                               double delay, double amp) {
  // delay >= 0, so truncation is floor.
  const long long whole = static_cast<long long>(delay);
  const double pos = (delay - static_cast<double>(whole)) * kTableRes;
  const int row = std::min(static_cast<int>(pos), kTableRes - 1);
  const double mix = pos - row;
  const double* lo = table + row * 2 * kHalfTaps;
  const double* hi = lo + 2 * kHalfTaps;
  const long long base = whole - (kHalfTaps - 1);
  if (base >= 0 && base + 2 * kHalfTaps <= len) {
    double* dst = taps + base;
    for (int i = 0; i < 2 * kHalfTaps; ++i) dst[i] += amp * (lo[i] + mix * (hi[i] - lo[i]));
    return;
  }
  for (int i = 0; i < 2 * kHalfTaps; ++i) {
    const long long n = base + i;
    if (n < 0 || n >= len) continue;
    taps[n] += amp * (lo[i] + mix * (hi[i] - lo[i]));
  }
}

std::vector<Image> EnumerateImages(const RoomConfig& room, const Position& src,
                                   std::span<const Position> mics,
                                   double reach) {
  std::vector<Image> images;
  if (room.anechoic()) {
    images.push_back({src, 0});
    return images;
  }
  std::array<int, 3> bound{};
  for (int d = 0; d < 3; ++d) {
    bound[d] = static_cast<int>(std::ceil(reach / (2.0 * room.dims[d]))) + 1;
  }
  double span = 0.0;
  for (const Position& m : mics) span = std::max(span, Distance(m, mics[0]));
  const double limit = reach + span;
  const Position& anchor = mics[0];
  const int order = room.MaxOrder();

  for (int mx = -bound[0]; mx <= bound[0]; ++mx) {
    for (int q = 0; q <= 1; ++q) {
      const double x = (1 - 2 * q) * src[0] + 2.0 * mx * room.dims[0];
      const double dx = x - anchor[0];
      if (std::abs(dx) > limit) continue;
      for (int my = -bound[1]; my <= bound[1]; ++my) {
        for (int j = 0; j <= 1; ++j) {
          const double y = (1 - 2 * j) * src[1] + 2.0 * my * room.dims[1];
          const double dy = y - anchor[1];
          if (dx * dx + dy * dy > limit * limit) continue;
          for (int mz = -bound[2]; mz <= bound[2]; ++mz) {
            for (int k = 0; k <= 1; ++k) {
              const double z = (1 - 2 * k) * src[2] + 2.0 * mz * room.dims[2];
              const double dz = z - anchor[2];
              if (dx * dx + dy * dy + dz * dz > limit * limit) continue;
              const int refl = std::abs(2 * mx - q) + std::abs(2 * my - j) +
                               std::abs(2 * mz - k);
              if (refl > order) continue;
              images.push_back({{x, y, z}, refl});
            }
          }
        }
      }
    }
  }
  return images;
}

}  // namespace

void RoomConfig::Validate() const {
  for (double d : dims) {
    if (!(d > 0.0) || !std::isfinite(d)) throw Error("room dimensions must be positive");
  }
  if (!(t60 >= 0.0) || !std::isfinite(t60)) throw Error("T60 must be >= 0");
  if (!(sample_rate > 0.0)) throw Error("room sample rate must be positive");
  if (!(sound_speed > 0.0)) throw Error("room sound speed must be positive");
  if (max_order && *max_order < 0) throw Error("max order must be >= 0");
}

double RoomConfig::Surface() const {
  return 2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
}

double RoomConfig::Absorption() const {
  if (t60 == 0.0) return 1.0;
  return SabineAbsorption(*this, t60);
}

int RoomConfig::MaxOrder() const {
  if (max_order) return *max_order;
  const double min_dim = std::min({dims[0], dims[1], dims[2]});
  return static_cast<int>(std::ceil(sound_speed * t60 / (2.0 * min_dim))) + 1;
}

std::size_t RoomConfig::RirLength() const {
  return static_cast<std::size_t>(std::ceil(t60 * sample_rate)) + 1024;
}

double SabineAbsorption(const RoomConfig& room, double t60) {
  if (!(t60 > 0.0) || !std::isfinite(t60)) throw Error("T60 must be positive");
  const double alpha = 0.161 * room.Volume() / (room.Surface() * t60);
  return std::clamp(alpha, 1e-4, 1.0);
}

double SabineT60(const RoomConfig& room, double absorption) {
  if (!(absorption > 0.0)) throw Error("absorption must be positive");
  return 0.161 * room.Volume() / (room.Surface() * absorption);
}

std::vector<Rir> IsmRirs(const RoomConfig& room, const Position& src,
                         std::span<const Position> mics, Exec exec) {
  room.Validate();
  if (mics.empty()) throw Error("no microphones given");
  if (!StrictlyInside(room, src)) {
    throw Error("source " + Describe(src) + " is not strictly inside the room");
  }
  for (const Position& m : mics) {
    if (!StrictlyInside(room, m)) {
      throw Error("microphone " + Describe(m) + " is not strictly inside the room");
    }
    if (Distance(m, src) < 1e-9) throw Error("source coincides with a microphone");
  }
  const std::size_t len = room.RirLength();
  const double fs = room.sample_rate;
  const double c = room.sound_speed;
  const double reach = c * (static_cast<double>(len) + kHalfTaps) / fs;
  const std::vector<Image> images = EnumerateImages(room, src, mics, reach);

  const double beta = std::sqrt(1.0 - room.Absorption());
  int max_refl = 0;
  for (const Image& im : images) max_refl = std::max(max_refl, im.reflections);
  std::vector<double> gain(max_refl + 1, 1.0);
  for (int r = 1; r <= max_refl; ++r) gain[r] = gain[r - 1] * beta;

  std::vector<double> amp(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    amp[i] = gain[images[i].reflections] / (4.0 * kPi);
  }
  const double* table = PulseTable().data();
  const double samples_per_meter = fs / c;
  const double max_delay = static_cast<double>(len) + kHalfTaps;

  std::vector<Rir> out(mics.size());
  const auto render = [&](int m) {
    Rir& rir = out[m];
    rir.sample_rate = fs;
    rir.taps.assign(len, 0.0);
    const Position mic = mics[m];
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (amp[i] == 0.0) continue;
      const double dist = Distance(images[i].pos, mic);
      const double delay = dist * samples_per_meter;
      if (delay >= max_delay) continue;
      AddFractionalPulse(rir.taps.data(), static_cast<long long>(len), table, delay,
                         amp[i] / dist);
    }
  };
  const int num = static_cast<int>(mics.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < num; ++m) render(m);
  } else {
    for (int m = 0; m < num; ++m) render(m);
  }
  return out;
}

Rir IsmRir(const RoomConfig& room, const Position& src, const Position& mic) {
  const Position mics[1] = {mic};
  return IsmRirs(room, src, mics, Exec::kSerial)[0];
}

std::vector<Position> MicPositions(const ArrayGeometry& geom,
                                   const Position& center) {
  geom.Validate();
  std::vector<Position> out(geom.num_mics);
  for (int m = 0; m < geom.num_mics; ++m) {
    out[m] = {center[0] + ((geom.num_mics - 1) / 2.0 - m) * geom.spacing,
              center[1], center[2]};
  }
  return out;
}

Position PolarPosition(const Position& center, double distance, double az_deg) {
  const double az = DegToRad(az_deg);
  return {center[0] + distance * std::cos(az), center[1] + distance * std::sin(az),
          center[2]};
}

Position TrajectoryPosition(const SourceTrajectory& traj, int index) {
  if (const auto* s = std::get_if<StaticTrajectory>(&traj)) return s->position;
  const auto& c = std::get<CircularHopTrajectory>(traj);
  const int hops = static_cast<int>(std::floor((c.stop_az - c.start_az) / c.step + 1e-9));
  const int k = std::clamp(index, 0, std::max(hops, 0));
  return PolarPosition(c.center, c.radius, c.start_az + k * c.step);
}

double TrajectoryInterval(const SourceTrajectory& traj, double signal_seconds) {
  if (std::holds_alternative<StaticTrajectory>(traj)) return signal_seconds;
  return std::get<CircularHopTrajectory>(traj).interval;
}

namespace {

void ValidateTrajectory(const SourceTrajectory& traj, const RoomConfig& room,
                        int segments) {
  if (const auto* c = std::get_if<CircularHopTrajectory>(&traj)) {
    if (!(c->radius > 0.0)) throw Error("trajectory radius must be positive");
    if (!(c->interval > 0.0)) throw Error("trajectory interval must be positive");
    if (!(c->step > 0.0) || c->stop_az < c->start_az) {
      throw Error("trajectory must step forward from start to stop azimuth");
    }
  }
  for (int k = 0; k < segments; ++k) {
    const Position p = TrajectoryPosition(traj, k);
    if (!StrictlyInside(room, p)) {
      throw Error("trajectory leaves the room at " + Describe(p));
    }
  }
}

}  // namespace

std::vector<std::vector<double>> RenderMoving(std::span<const double> signal,
                                              const SourceTrajectory& traj,
                                              std::span<const Position> mics,
                                              const RoomConfig& room) {
  room.Validate();
  const std::size_t n = signal.size();
  std::vector<std::vector<double>> out(mics.size(), std::vector<double>(n, 0.0));
  if (n == 0) return out;
  const double seconds = static_cast<double>(n) / room.sample_rate;
  const std::size_t seg_len = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(TrajectoryInterval(traj, seconds) * room.sample_rate)));
  const int segments = static_cast<int>((n + seg_len - 1) / seg_len);
  ValidateTrajectory(traj, room, segments);

  std::map<Position, std::vector<Rir>> cache;
  for (int k = 0; k < segments; ++k) {
    const Position pos = TrajectoryPosition(traj, k);
    auto it = cache.find(pos);
    if (it == cache.end()) it = cache.emplace(pos, IsmRirs(room, pos, mics)).first;
    const std::size_t start = static_cast<std::size_t>(k) * seg_len;
    const std::size_t stop = std::min(n, start + seg_len);
    const std::span<const double> seg = signal.subspan(start, stop - start);
    const int num = static_cast<int>(mics.size());
#pragma omp parallel for schedule(static)
    for (int m = 0; m < num; ++m) {
      const std::vector<double> y = kernels::ConvolveFft(seg, it->second[m].taps, n - start);
      for (std::size_t i = 0; i < y.size(); ++i) out[m][start + i] += y[i];
    }
  }
  return out;
}

void Scenario::Validate() const {
  room.Validate();
  geometry.Validate();
  if (geometry.sample_rate != room.sample_rate) {
    throw Error("array and room sample rates differ");
  }
  for (const Position& m : MicPositions(geometry, array_center)) {
    if (!StrictlyInside(room, m)) throw Error("array does not fit inside the room");
  }
  if (!(target_distance > 0.0)) throw Error("target distance must be positive");
  if (std::isnan(snr_db)) throw Error("SNR must not be NaN");
}

ScenarioAudio SynthesizeScenario(const Scenario& scn,
                                 std::span<const double> target_wav,
                                 const std::vector<std::vector<double>>& interferer_wavs) {
  scn.Validate();
  if (target_wav.empty()) throw Error("target signal is empty");
  if (interferer_wavs.size() != scn.interferers.size()) {
    throw Error("need one interferer signal per interferer trajectory");
  }
  const std::size_t n = target_wav.size();
  const std::vector<Position> mics = MicPositions(scn.geometry, scn.array_center);
  const std::size_t num_mics = mics.size();
  const Position target_pos =
      PolarPosition(scn.array_center, scn.target_distance, scn.target_az);

  ScenarioAudio out;
  out.target = RenderMoving(target_wav, StaticTrajectory{target_pos}, mics, scn.room);
  out.interference.assign(num_mics, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < scn.interferers.size(); ++i) {
    if (interferer_wavs[i].empty()) throw Error("interferer signal is empty");
    std::vector<double> wav(n, 0.0);
    std::copy_n(interferer_wavs[i].begin(), std::min(n, interferer_wavs[i].size()), wav.begin());
    const auto rendered = RenderMoving(wav, scn.interferers[i], mics, scn.room);
    for (std::size_t m = 0; m < num_mics; ++m) {
      for (std::size_t s = 0; s < n; ++s) out.interference[m][s] += rendered[m][s];
    }
  }

  RoomConfig direct = scn.room;
  direct.max_order = 0;
  const Rir direct_rir = IsmRir(direct, target_pos, mics[0]);
  out.reference = kernels::ConvolveFft(target_wav, direct_rir.taps, n);

  out.noise.assign(num_mics, std::vector<double>(n, 0.0));
  if (std::isfinite(scn.snr_db)) {
    double target_energy = 0.0;
    for (double v : out.target[0]) target_energy += v * v;
    if (!(target_energy > 0.0)) throw Error("target is silent; SNR is unreachable");
    std::mt19937_64 rng(scn.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& ch : out.noise) {
      for (double& v : ch) v = gauss(rng);
    }
    double noise_energy = 0.0;
    for (double v : out.noise[0]) noise_energy += v * v;
    const double scale =
        std::sqrt(target_energy / (noise_energy * std::pow(10.0, scn.snr_db / 10.0)));
    for (auto& ch : out.noise) {
      for (double& v : ch) v *= scale;
    }
  } else if (scn.snr_db < 0.0) {
    throw Error("SNR of -infinity is not supported");
  }

  out.mixture.assign(num_mics, std::vector<double>(n, 0.0));
  for (std::size_t m = 0; m < num_mics; ++m) {
    for (std::size_t s = 0; s < n; ++s) {
      out.mixture[m][s] = out.target[m][s] + out.interference[m][s] + out.noise[m][s];
    }
  }
  return out;
}

std::vector<double> SilenceTrim(std::span<const double> wav, double sample_rate,
                                const SilenceTrimOptions& opts) {
  if (wav.empty()) throw Error("cannot trim an empty signal");
  const std::size_t frame = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opts.frame * sample_rate)));
  const long long max_gap_frames = std::llround(opts.max_gap / opts.frame);
  const std::size_t frames = (wav.size() + frame - 1) / frame;

  std::vector<double> energy(frames, 0.0);
  double peak = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t lo = f * frame;
    const std::size_t hi = std::min(wav.size(), lo + frame);
    double e = 0.0;
    for (std::size_t i = lo; i < hi; ++i) e += wav[i] * wav[i];
    energy[f] = e / static_cast<double>(hi - lo);
    peak = std::max(peak, energy[f]);
  }
  if (!(peak > 0.0)) throw Error("signal is entirely silent");
  const double threshold = peak * std::pow(10.0, opts.threshold_db / 10.0);

  std::vector<double> out;
  out.reserve(wav.size());
  long long run = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    const bool silent = energy[f] < threshold;
    run = silent ? run + 1 : 0;
    if (silent && run > max_gap_frames) continue;
    const std::size_t lo = f * frame;
    const std::size_t hi = std::min(wav.size(), lo + frame);
    out.insert(out.end(), wav.begin() + lo, wav.begin() + hi);
  }
  return out;
}

}  // namespace beamfusion
