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

#ifndef BEAMFUSION_STFT_H_
#define BEAMFUSION_STFT_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "beamfusion/common.h"
#include "beamfusion/fft.h"

namespace beamfusion {

enum class WindowKind : std::uint32_t {
  kSqrtHann = 0,  // periodic square-root Hann, same taper for both stages
};

struct StftConfig {
  int nfft = 512;
  int window_len = 512;
  int hop = 128;
  WindowKind window = WindowKind::kSqrtHann;

  int num_bins() const { return nfft / 2 + 1; }
  // Zeros prepended so that the first frame ends at sample hop - 1.
  int padding() const { return window_len - hop; }
  // Throws Error unless window_len == nfft, hop divides window_len and the
  // analysis/synthesis pair is constant-overlap-add within 1e-10.
  void Validate() const;
  bool operator==(const StftConfig&) const = default;
};

std::vector<double> AnalysisWindow(const StftConfig& cfg);
// Analysis window divided by the overlap-add sum of squared windows.
std::vector<double> SynthesisWindow(const StftConfig& cfg);

// T x F one-sided spectrogram. Frame t covers samples
// [t * hop - padding, t * hop - padding + window_len) of the input.
struct Spectrogram {
  CMatrix data;
  StftConfig config;

  int frames() const { return static_cast<int>(data.rows()); }
  int bins() const { return static_cast<int>(data.cols()); }
};

struct MultichannelSpectrogram {
  std::vector<Spectrogram> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  int frames() const { return channels.empty() ? 0 : channels[0].frames(); }
  int bins() const { return channels.empty() ? 0 : channels[0].bins(); }
};

// Number of frames Analyze produces for a signal of `length` samples.
int NumFrames(std::size_t length, const StftConfig& cfg);

Spectrogram Analyze(std::span<const double> signal, const StftConfig& cfg,
                    Exec exec = Exec::kParallel);

// Weighted overlap-add. Output has frames * hop + window_len - hop samples
// and starts `padding()` samples before the analyzed signal's first sample.
std::vector<double> Synthesize(const Spectrogram& spec,
                               Exec exec = Exec::kParallel);

// Synthesize, then drop the leading padding and resize to `length` samples
// so the result lines up with the signal that was analyzed.
std::vector<double> SynthesizeAligned(const Spectrogram& spec,
                                      std::size_t length,
                                      Exec exec = Exec::kParallel);

MultichannelSpectrogram AnalyzeMultichannel(
    const std::vector<std::vector<double>>& signals, const StftConfig& cfg,
    Exec exec = Exec::kParallel);

// Frame-online analysis: feed `hop` samples, get one spectrum frame. Frames
// are bit-identical to the ones Analyze computes for the same samples.
class StreamingAnalyzer {
 public:
  explicit StreamingAnalyzer(const StftConfig& cfg);

  // `chunk` must hold exactly hop samples; `frame` receives num_bins values.
  void Push(std::span<const double> chunk, std::span<Complex> frame);
  void Reset();

 private:
  StftConfig cfg_;
  std::vector<double> window_;
  std::vector<double> buffer_;
  std::vector<double> windowed_;
  std::shared_ptr<const RealFft> fft_;
};

// Frame-online overlap-add: feed one spectrum frame, get hop finished
// samples. Output matches Synthesize sample for sample.
class StreamingSynthesizer {
 public:
  explicit StreamingSynthesizer(const StftConfig& cfg);

  void Push(std::span<const Complex> frame, std::span<double> out);
  // Emits the window_len - hop samples still pending and clears the state.
  void Flush(std::span<double> out);
  void Reset();

 private:
  StftConfig cfg_;
  std::vector<double> window_;
  std::vector<double> accum_;
  std::vector<double> frame_;
  std::shared_ptr<const RealFft> fft_;
};

// Shared, lazily built transform for a given size.
std::shared_ptr<const RealFft> GetRealFft(int size);

}  // namespace beamfusion

#endif  // BEAMFUSION_STFT_H_
