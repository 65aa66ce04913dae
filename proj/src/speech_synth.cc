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

#include "beamfusion/speech_synth.h"

#include <array>
#include <cmath>
#include <random>

#include "beamfusion/common.h"

namespace beamfusion {
namespace {

// Two-pole resonator.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;

  double Step(double x, double freq, double bw, double fs) {
    const double r = std::exp(-kPi * bw / fs);
    const double a1 = 2.0 * r * std::cos(2.0 * kPi * freq / fs);
    const double a2 = -r * r;
    const double y = (1.0 - r) * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

struct Vowel {
  std::array<double, 3> formants;
};

constexpr std::array<Vowel, 6> kVowels{{
    {{730.0, 1090.0, 2440.0}},
    {{270.0, 2290.0, 3010.0}},
    {{300.0, 870.0, 2240.0}},
    {{530.0, 1840.0, 2480.0}},
    {{570.0, 840.0, 2410.0}},
    {{660.0, 1720.0, 2410.0}},
}};

}  // namespace

std::vector<double> SynthesizeSpeech(std::uint64_t seed,
                                     const SpeechSynthOptions& opts) {
  if (!(opts.sample_rate > 0.0) || !(opts.seconds > 0.0) ||
      !(opts.syllable_rate > 0.0)) {
    throw Error("speech synth: sample rate, duration and syllable rate must be positive");
  }
  const double fs = opts.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(opts.seconds * fs));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> out(n, 0.0);
  std::array<Resonator, 3> res;
  const double base_f0 = 90.0 + 140.0 * uni(rng);
  double phase = 0.0;

  // Per-syllable parameters, refreshed at syllable boundaries.
  std::size_t syl_start = 0, syl_len = 1;
  bool pause = false;
  double voiced_mix = 1.0;
  std::array<double, 3> f_from{}, f_to{};
  double f0_from = base_f0, f0_to = base_f0;
  const auto new_syllable = [&](std::size_t at) {
    syl_start = at;
    syl_len = static_cast<std::size_t>(fs / opts.syllable_rate * (0.6 + 0.8 * uni(rng)));
    pause = uni(rng) < opts.pause_prob;
    voiced_mix = 0.6 + 0.4 * uni(rng);
    const Vowel& a = kVowels[static_cast<std::size_t>(uni(rng) * kVowels.size()) % kVowels.size()];
    const Vowel& b = kVowels[static_cast<std::size_t>(uni(rng) * kVowels.size()) % kVowels.size()];
    f_from = a.formants;
    f_to = b.formants;
    f0_from = f0_to;
    f0_to = base_f0 * (0.8 + 0.4 * uni(rng));
  };
  new_syllable(0);

  for (std::size_t i = 0; i < n; ++i) {
    if (i - syl_start >= syl_len) new_syllable(i);
    const double u = static_cast<double>(i - syl_start) / static_cast<double>(syl_len);
    const double env = pause ? 0.0 : std::pow(std::sin(kPi * u), 2.0);
    const double f0 = (f0_from + (f0_to - f0_from) * u) * (1.0 + 0.01 * gauss(rng));
    phase += f0 / fs;
    double excitation = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      excitation = 1.0;
    }
    excitation = voiced_mix * excitation + (1.0 - voiced_mix) * 0.3 * gauss(rng);
    double y = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double f = f_from[k] + (f_to[k] - f_from[k]) * u;
      y += res[k].Step(excitation, f, 60.0 + 40.0 * k, fs) / static_cast<double>(k + 1);
    }
    out[i] = env * y;
  }

  double energy = 0.0;
  for (double v : out) energy += v * v;
  if (energy <= 0.0) {
    // Every slot drew a pause; fall back to noise so callers get a signal.
    for (double& v : out) v = gauss(rng);
    energy = 0.0;
    for (double v : out) energy += v * v;
  }
  const double scale = 1.0 / std::sqrt(energy / static_cast<double>(n));
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace beamfusion
