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

#ifndef BEAMFUSION_SPEECH_SYNTH_H_
#define BEAMFUSION_SPEECH_SYNTH_H_

#include <cstdint>
#include <vector>

namespace beamfusion {

struct SpeechSynthOptions {
  double sample_rate = 16000.0;
  double seconds = 10.0;
  double syllable_rate = 4.0;  // Hz
  double pause_prob = 0.15;    // chance a syllable slot is a short pause
};

// Speech-like test signal: a jittered glottal pulse train mixed with
// aspiration noise, shaped by three time-varying formant resonators and a
// syllabic envelope. Output is deterministic in `seed` and has unit RMS.
std::vector<double> SynthesizeSpeech(std::uint64_t seed,
                                     const SpeechSynthOptions& opts = {});

}  // namespace beamfusion

#endif  // BEAMFUSION_SPEECH_SYNTH_H_
