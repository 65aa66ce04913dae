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

#ifndef BEAMFUSION_WAV_H_
#define BEAMFUSION_WAV_H_

#include <span>
#include <string>
#include <vector>

namespace beamfusion {

struct WavData {
  int sample_rate = 16000;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const { return channels.empty() ? 0 : channels[0].size(); }
};

// RIFF/WAVE, IEEE float32, interleaved. All channels must have equal length.
std::string EncodeWav(const std::vector<std::vector<double>>& channels,
                      int sample_rate);
void WriteWav(const std::string& path,
              const std::vector<std::vector<double>>& channels, int sample_rate);
void WriteWavMono(const std::string& path, std::span<const double> samples,
                  int sample_rate);

// Reads float32 or 16/24/32-bit PCM, plain or WAVE_FORMAT_EXTENSIBLE.
WavData DecodeWav(const std::string& bytes, const std::string& name = "<memory>");
WavData ReadWav(const std::string& path);

}  // namespace beamfusion

#endif  // BEAMFUSION_WAV_H_
