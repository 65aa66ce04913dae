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

#include "beamfusion/wav.h"

#include <cmath>

#include "beamfusion/common.h"
#include "beamfusion/tensor_file.h"

namespace beamfusion {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

std::string EncodeWav(const std::vector<std::vector<double>>& channels,
                      int sample_rate) {
  if (channels.empty()) throw Error("cannot write a WAV with no channels");
  const std::size_t frames = channels[0].size();
  for (const auto& ch : channels) {
    if (ch.size() != frames) throw Error("WAV channels have different lengths");
  }
  const auto num_ch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * num_ch * 4);
  ByteWriter w;
  w.Raw("RIFF");
  w.U32(36 + data_bytes);
  w.Raw("WAVE");
  w.Raw("fmt ");
  w.U32(16);
  w.U16(kFormatFloat);
  w.U16(num_ch);
  w.U32(static_cast<std::uint32_t>(sample_rate));
  w.U32(static_cast<std::uint32_t>(sample_rate) * num_ch * 4);
  w.U16(static_cast<std::uint16_t>(num_ch * 4));
  w.U16(32);
  w.Raw("data");
  w.U32(data_bytes);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : channels) w.F32(static_cast<float>(ch[i]));
  }
  return w.data();
}

void WriteWav(const std::string& path,
              const std::vector<std::vector<double>>& channels, int sample_rate) {
  WriteFileBytes(path, EncodeWav(channels, sample_rate));
}

void WriteWavMono(const std::string& path, std::span<const double> samples,
                  int sample_rate) {
  WriteWav(path, {std::vector<double>(samples.begin(), samples.end())}, sample_rate);
}

WavData DecodeWav(const std::string& bytes, const std::string& name) {
  try {
    ByteReader r(bytes);
    if (r.Raw(4) != "RIFF") throw FormatError("not a RIFF file");
    r.U32();
    if (r.Raw(4) != "WAVE") throw FormatError("not a WAVE file");
    std::uint16_t format = 0, num_ch = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    while (r.remaining() >= 8) {
      const std::string_view id = r.Raw(4);
      const std::uint32_t size = r.U32();
      if (id == "fmt ") {
        ByteReader f(r.Raw(size));
        format = f.U16();
        num_ch = f.U16();
        rate = f.U32();
        f.U32();
        f.U16();
        bits = f.U16();
        if (format == kFormatExtensible && size >= 40) {
          f.U16();
          f.U16();
          f.U32();
          format = f.U16();  // first two bytes of the subformat GUID
        }
        have_fmt = true;
      } else if (id == "data") {
        if (!have_fmt) throw FormatError("data chunk before fmt chunk");
        if (num_ch == 0) throw FormatError("zero channels");
        const bool is_float = format == kFormatFloat && bits == 32;
        const bool is_pcm = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
        if (!is_float && !is_pcm) {
          throw FormatError("unsupported sample format " + std::to_string(format) +
                            "/" + std::to_string(bits) + " bit");
        }
        const std::size_t width = bits / 8;
        // 0xFFFFFFFF marks a stream whose length was never patched in.
        if (size != 0xFFFFFFFFu && size > r.remaining()) {
          throw FormatError("truncated data chunk");
        }
        const std::size_t frames = std::min<std::size_t>(size, r.remaining()) / (width * num_ch);
        WavData out;
        out.sample_rate = static_cast<int>(rate);
        out.channels.assign(num_ch, std::vector<double>(frames));
        for (std::size_t i = 0; i < frames; ++i) {
          for (std::uint16_t c = 0; c < num_ch; ++c) {
            double v;
            if (is_float) {
              v = r.F32();
            } else if (bits == 16) {
              v = static_cast<std::int16_t>(r.U16()) / 32768.0;
            } else if (bits == 24) {
              std::uint32_t u = r.U8() | (r.U8() << 8) | (r.U8() << 16);
              if (u & 0x800000) u |= 0xFF000000u;
              v = static_cast<std::int32_t>(u) / 8388608.0;
            } else {
              v = static_cast<std::int32_t>(r.U32()) / 2147483648.0;
            }
            if (!std::isfinite(v)) throw FormatError("non-finite sample");
            out.channels[c][i] = v;
          }
        }
        return out;
      } else {
        r.Raw(size + (size & 1));
      }
    }
    throw FormatError("no data chunk");
  } catch (const FormatError& e) {
    throw FormatError(name + ": " + e.what());
  }
}

WavData ReadWav(const std::string& path) { return DecodeWav(ReadFileBytes(path), path); }

}  // namespace beamfusion
