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

#include "beamfusion/stft.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace beamfusion {
namespace {

void WindowFrame(const double* src, const std::vector<double>& window,
                 double* dst) {
  for (std::size_t n = 0; n < window.size(); ++n) dst[n] = window[n] * src[n];
}

void InverseFrame(const RealFft& fft, const Complex* spectrum,
                  const std::vector<double>& window, double* dst) {
  fft.Inverse(spectrum, dst);
  const double scale = 1.0 / fft.size();
  for (std::size_t n = 0; n < window.size(); ++n) {
    dst[n] = dst[n] * scale * window[n];
  }
}

}  // namespace

std::shared_ptr<const RealFft> GetRealFft(int size) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const RealFft>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[size];
  if (!slot) slot = std::make_shared<const RealFft>(size);
  return slot;
}

void StftConfig::Validate() const {
  if (nfft < 4 || nfft % 2 != 0) {
    throw Error("STFT size must be even and >= 4, got " + std::to_string(nfft));
  }
  if (window_len != nfft) throw Error("window length must equal the FFT size");
  if (hop <= 0 || window_len % hop != 0 || window_len / hop < 2) {
    throw Error("hop must divide the window length with overlap, got hop " +
                std::to_string(hop));
  }
  if (window != WindowKind::kSqrtHann) throw Error("unknown window kind");
}

std::vector<double> AnalysisWindow(const StftConfig& cfg) {
  cfg.Validate();
  std::vector<double> w(cfg.window_len);
  for (int n = 0; n < cfg.window_len; ++n) {
    w[n] = std::sqrt(0.5 - 0.5 * std::cos(2.0 * kPi * n / cfg.window_len));
  }
  return w;
}

std::vector<double> SynthesisWindow(const StftConfig& cfg) {
  std::vector<double> w = AnalysisWindow(cfg);
  std::vector<double> cola(cfg.hop, 0.0);
  for (int n = 0; n < cfg.window_len; ++n) cola[n % cfg.hop] += w[n] * w[n];
  const auto [lo, hi] = std::minmax_element(cola.begin(), cola.end());
  if (*hi - *lo > 1e-10 * *hi) {
    throw Error("window/hop pair is not constant-overlap-add");
  }
  for (int n = 0; n < cfg.window_len; ++n) w[n] /= cola[n % cfg.hop];
  return w;
}

int NumFrames(std::size_t length, const StftConfig& cfg) {
  if (length < static_cast<std::size_t>(cfg.window_len)) return 0;
  return static_cast<int>(length / cfg.hop);
}

Spectrogram Analyze(std::span<const double> signal, const StftConfig& cfg,
                    Exec exec) {
  cfg.Validate();
  if (signal.empty()) throw Error("cannot analyze an empty signal");
  if (signal.size() < static_cast<std::size_t>(cfg.window_len)) {
    throw Error("signal shorter than one window (" +
                std::to_string(signal.size()) + " samples)");
  }
  for (double x : signal) {
    if (!std::isfinite(x)) throw Error("signal contains non-finite samples");
  }
  const std::vector<double> window = AnalysisWindow(cfg);
  const auto fft = GetRealFft(cfg.nfft);
  const int frames = NumFrames(signal.size(), cfg);
  const int pad = cfg.padding();

  std::vector<double> padded(pad + signal.size(), 0.0);
  std::copy(signal.begin(), signal.end(), padded.begin() + pad);

  Spectrogram spec;
  spec.config = cfg;
  spec.data.resize(frames, cfg.num_bins());
  const auto body = [&](int t, std::vector<double>& scratch) {
    WindowFrame(padded.data() + static_cast<std::size_t>(t) * cfg.hop, window,
                scratch.data());
    fft->Forward(scratch.data(), spec.data.row(t).data());
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel
    {
      std::vector<double> scratch(cfg.nfft);
#pragma omp for schedule(static)
      for (int t = 0; t < frames; ++t) body(t, scratch);
    }
  } else {
    std::vector<double> scratch(cfg.nfft);
    for (int t = 0; t < frames; ++t) body(t, scratch);
  }
  return spec;
}

std::vector<double> Synthesize(const Spectrogram& spec, Exec exec) {
  const StftConfig& cfg = spec.config;
  cfg.Validate();
  if (spec.bins() != cfg.num_bins()) {
    throw Error("spectrogram has " + std::to_string(spec.bins()) +
                " bins, config expects " + std::to_string(cfg.num_bins()));
  }
  const std::vector<double> window = SynthesisWindow(cfg);
  const auto fft = GetRealFft(cfg.nfft);
  const int frames = spec.frames();
  const int len = cfg.window_len;

  std::vector<double> time_frames(static_cast<std::size_t>(frames) * len);
  const auto body = [&](int t) {
    InverseFrame(*fft, spec.data.row(t).data(), window,
                 time_frames.data() + static_cast<std::size_t>(t) * len);
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < frames; ++t) body(t);
  } else {
    for (int t = 0; t < frames; ++t) body(t);
  }

  std::vector<double> out(
      frames == 0 ? 0 : static_cast<std::size_t>(frames) * cfg.hop + len - cfg.hop,
      0.0);
  for (int t = 0; t < frames; ++t) {
    const double* src = time_frames.data() + static_cast<std::size_t>(t) * len;
    double* dst = out.data() + static_cast<std::size_t>(t) * cfg.hop;
    for (int n = 0; n < len; ++n) dst[n] += src[n];
  }
  return out;
}

std::vector<double> SynthesizeAligned(const Spectrogram& spec,
                                      std::size_t length, Exec exec) {
  std::vector<double> full = Synthesize(spec, exec);
  const std::size_t pad = spec.config.padding();
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < length && i + pad < full.size(); ++i) {
    out[i] = full[i + pad];
  }
  return out;
}

MultichannelSpectrogram AnalyzeMultichannel(
    const std::vector<std::vector<double>>& signals, const StftConfig& cfg,
    Exec exec) {
  if (signals.empty()) throw Error("no channels to analyze");
  for (const auto& ch : signals) {
    if (ch.size() != signals[0].size()) {
      throw Error("channels have inconsistent lengths");
    }
  }
  MultichannelSpectrogram mc;
  mc.channels.reserve(signals.size());
  for (const auto& ch : signals) mc.channels.push_back(Analyze(ch, cfg, exec));
  return mc;
}

StreamingAnalyzer::StreamingAnalyzer(const StftConfig& cfg)
    : cfg_(cfg),
      window_(AnalysisWindow(cfg)),
      buffer_(cfg.window_len, 0.0),
      windowed_(cfg.nfft, 0.0),
      fft_(GetRealFft(cfg.nfft)) {}

void StreamingAnalyzer::Push(std::span<const double> chunk,
                             std::span<Complex> frame) {
  if (chunk.size() != static_cast<std::size_t>(cfg_.hop)) {
    throw Error("streaming analyzer expects exactly hop samples per push");
  }
  if (frame.size() != static_cast<std::size_t>(cfg_.num_bins())) {
    throw Error("streaming analyzer output frame has the wrong size");
  }
  std::copy(buffer_.begin() + cfg_.hop, buffer_.end(), buffer_.begin());
  std::copy(chunk.begin(), chunk.end(), buffer_.end() - cfg_.hop);
  WindowFrame(buffer_.data(), window_, windowed_.data());
  fft_->Forward(windowed_.data(), frame.data());
}

void StreamingAnalyzer::Reset() {
  std::fill(buffer_.begin(), buffer_.end(), 0.0);
}

StreamingSynthesizer::StreamingSynthesizer(const StftConfig& cfg)
    : cfg_(cfg),
      window_(SynthesisWindow(cfg)),
      accum_(cfg.window_len, 0.0),
      frame_(cfg.window_len, 0.0),
      fft_(GetRealFft(cfg.nfft)) {}

void StreamingSynthesizer::Push(std::span<const Complex> frame,
                                std::span<double> out) {
  if (frame.size() != static_cast<std::size_t>(cfg_.num_bins())) {
    throw Error("streaming synthesizer input frame has the wrong size");
  }
  if (out.size() != static_cast<std::size_t>(cfg_.hop)) {
    throw Error("streaming synthesizer emits exactly hop samples per push");
  }
  InverseFrame(*fft_, frame.data(), window_, frame_.data());
  for (int n = 0; n < cfg_.window_len; ++n) accum_[n] += frame_[n];
  std::copy(accum_.begin(), accum_.begin() + cfg_.hop, out.begin());
  std::copy(accum_.begin() + cfg_.hop, accum_.end(), accum_.begin());
  std::fill(accum_.end() - cfg_.hop, accum_.end(), 0.0);
}

void StreamingSynthesizer::Flush(std::span<double> out) {
  const std::size_t tail = cfg_.window_len - cfg_.hop;
  if (out.size() != tail) throw Error("flush expects window_len - hop samples");
  std::copy(accum_.begin(), accum_.begin() + tail, out.begin());
  Reset();
}

void StreamingSynthesizer::Reset() {
  std::fill(accum_.begin(), accum_.end(), 0.0);
}

}  // namespace beamfusion
