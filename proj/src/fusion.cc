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

#include "beamfusion/fusion.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace beamfusion {
namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// out = (1 - z) * h + z * c, see GruWeights. `x`, `h` and `out` hold D values;
// `out` may alias neither input.
void GruCell(const GruWeights& g, const double* x, const double* h,
             double* out, int dim, std::vector<double>& scratch) {
  scratch.resize(3 * static_cast<std::size_t>(dim));
  double* z = scratch.data();
  double* r = z + dim;
  double* rh = r + dim;
  for (int i = 0; i < dim; ++i) {
    double az = g.bz[i];
    double ar = g.br[i];
    for (int j = 0; j < dim; ++j) {
      az += g.wz(i, j) * x[j];
      ar += g.wr(i, j) * x[j];
    }
    for (int j = 0; j < dim; ++j) {
      az += g.wz(i, dim + j) * h[j];
      ar += g.wr(i, dim + j) * h[j];
    }
    z[i] = Sigmoid(az);
    r[i] = Sigmoid(ar);
  }
  for (int j = 0; j < dim; ++j) rh[j] = r[j] * h[j];
  for (int i = 0; i < dim; ++i) {
    double ac = g.bh[i];
    for (int j = 0; j < dim; ++j) ac += g.wh(i, j) * x[j];
    for (int j = 0; j < dim; ++j) ac += g.wh(i, dim + j) * rh[j];
    out[i] = (1.0 - z[i]) * h[i] + z[i] * std::tanh(ac);
  }
}

void CheckShape(const RMatrix& m, int rows, int cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(std::string("model tensor ") + name + " has shape [" +
                std::to_string(m.rows()) + ", " + std::to_string(m.cols()) +
                "], expected [" + std::to_string(rows) + ", " +
                std::to_string(cols) + "]");
  }
  if (!m.allFinite()) throw Error(std::string("model tensor ") + name + " is not finite");
}

void CheckShape(const RVector& v, int size, const char* name) {
  if (v.size() != size) {
    throw Error(std::string("model tensor ") + name + " has length " +
                std::to_string(v.size()) + ", expected " + std::to_string(size));
  }
  if (!v.allFinite()) throw Error(std::string("model tensor ") + name + " is not finite");
}

GruWeights ZeroGru(int dim) {
  GruWeights g;
  g.wz = g.wr = g.wh = RMatrix::Zero(dim, 2 * dim);
  g.bz = g.br = g.bh = RVector::Zero(dim);
  return g;
}

}  // namespace

void ModelHeader::Validate() const {
  stft.Validate();
  if (beams < 2) throw Error("model needs at least 2 beams");
  if (bins != stft.num_bins()) throw Error("model bin count does not match the STFT");
  if (hidden < 1) throw Error("model hidden width must be positive");
  if (sample_rate <= 0) throw Error("model sample rate must be positive");
  if (knee < 0 || knee >= bands || bands >= bins) {
    throw Error("model band layout is inconsistent");
  }
}

void ModelParams::Validate() const {
  header.Validate();
  const int p = header.beams;
  const int d = header.hidden;
  CheckShape(enc_w, d, 3 * p, "enc/W");
  CheckShape(enc_b, d, "enc/b");
  for (const auto* g : {&intra, &inter}) {
    const char* tag = g == &intra ? "intra" : "inter";
    CheckShape(g->wz, d, 2 * d, tag);
    CheckShape(g->wr, d, 2 * d, tag);
    CheckShape(g->wh, d, 2 * d, tag);
    CheckShape(g->bz, d, tag);
    CheckShape(g->br, d, tag);
    CheckShape(g->bh, d, tag);
  }
  CheckShape(intra_proj, d, d, "intra/proj");
  CheckShape(dec_w, p, d, "dec/W");
  CheckShape(dec_b, p, "dec/b");
  if (erb.num_bands() != header.bands || erb.num_bins() != header.bins ||
      erb.knee != header.knee) {
    throw Error("model ERB bank does not match its header");
  }
}

ModelParams ModelParams::Zeros(const ModelHeader& header) {
  header.Validate();
  const int p = header.beams;
  const int d = header.hidden;
  ModelParams m;
  m.header = header;
  m.enc_w = RMatrix::Zero(d, 3 * p);
  m.enc_b = RVector::Zero(d);
  m.intra = ZeroGru(d);
  m.intra_proj = RMatrix::Zero(d, d);
  m.inter = ZeroGru(d);
  m.dec_w = RMatrix::Zero(p, d);
  m.dec_b = RVector::Zero(p);
  m.erb = MakeErbBank(header.bins, header.bands, header.sample_rate, header.knee);
  return m;
}

ModelParams ModelParams::Random(const ModelHeader& header, std::uint64_t seed,
                                double scale) {
  ModelParams m = Zeros(header);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  const auto fill = [&](auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      t.data()[i] = static_cast<double>(static_cast<float>(dist(rng)));
    }
  };
  fill(m.enc_w);
  fill(m.enc_b);
  for (GruWeights* g : {&m.intra, &m.inter}) {
    fill(g->wz);
    fill(g->wr);
    fill(g->wh);
    fill(g->bz);
    fill(g->br);
    fill(g->bh);
  }
  fill(m.intra_proj);
  fill(m.dec_w);
  fill(m.dec_b);
  return m;
}

FusionState::FusionState(const ModelParams& params)
    : hidden_(RMatrix::Zero(params.header.bands, params.header.hidden)) {}

void FusionState::Reset() {
  hidden_.setZero();
  frame_count_ = 0;
}

RMatrix ExtractFeatures(const CMatrix& beam_frame, const ErbBank& erb) {
  const int bins = erb.num_bins();
  const int bands = erb.num_bands();
  if (beam_frame.rows() != bins) {
    throw Error("beam frame has " + std::to_string(beam_frame.rows()) +
                " bins, ERB bank expects " + std::to_string(bins));
  }
  if (!beam_frame.allFinite()) throw Error("beam frame contains non-finite values");
  const int beams = static_cast<int>(beam_frame.cols());
  RMatrix out = RMatrix::Zero(3 * beams, bands);
  for (int p = 0; p < beams; ++p) {
    for (int b = 0; b < bands; ++b) {
      double re = 0.0, im = 0.0, mag = 0.0;
      for (int k = 0; k < bins; ++k) {
        const double w = erb.analysis(b, k);
        if (w == 0.0) continue;
        const Complex z = beam_frame(k, p);
        re += w * z.real();
        im += w * z.imag();
        mag += w * std::abs(z);
      }
      out(p, b) = re;
      out(beams + p, b) = im;
      out(2 * beams + p, b) = mag;
    }
  }
  return out;
}

void InferFrame(const ModelParams& params, FusionState& state,
                const RMatrix& features, RMatrix& mask, Exec exec) {
  const ModelHeader& hd = params.header;
  const int beams = hd.beams;
  const int dim = hd.hidden;
  const int bands = hd.bands;
  if (!state.initialized()) throw Error("fusion state is not initialized");
  if (state.hidden_.rows() != bands || state.hidden_.cols() != dim) {
    throw Error("fusion state does not belong to this model");
  }
  if (features.rows() != 3 * beams || features.cols() != bands) {
    throw Error("feature frame must be " + std::to_string(3 * beams) + " x " +
                std::to_string(bands));
  }
  const bool parallel = exec == Exec::kParallel;

  // Encoder: per-band affine 3P -> D, tanh.
  RMatrix enc(bands, dim);
#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < bands; ++b) {
    for (int i = 0; i < dim; ++i) {
      double acc = params.enc_b[i];
      for (int c = 0; c < 3 * beams; ++c) acc += params.enc_w(i, c) * features(c, b);
      enc(b, i) = std::tanh(acc);
    }
  }

  // Intra-frame recurrence, low to high band, residual through a projection.
  RMatrix intra_out(bands, dim);
  {
    std::vector<double> h(dim, 0.0), h_next(dim), scratch;
    for (int b = 0; b < bands; ++b) {
      GruCell(params.intra, enc.row(b).data(), h.data(), h_next.data(), dim, scratch);
      h.swap(h_next);
      for (int i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < dim; ++j) acc += params.intra_proj(i, j) * h[j];
        intra_out(b, i) = enc(b, i) + acc;
      }
    }
  }

  // Inter-frame recurrence per band over time, residual add; decoder logits.
  RMatrix logits(bands, beams);
#pragma omp parallel if (parallel)
  {
    std::vector<double> next(dim), scratch;
#pragma omp for schedule(static)
    for (int b = 0; b < bands; ++b) {
      GruCell(params.inter, intra_out.row(b).data(), state.hidden_.row(b).data(),
              next.data(), dim, scratch);
      for (int i = 0; i < dim; ++i) state.hidden_(b, i) = next[i];
      for (int p = 0; p < beams; ++p) {
        double acc = params.dec_b[p];
        for (int i = 0; i < dim; ++i) acc += params.dec_w(p, i) * (intra_out(b, i) + next[i]);
        logits(b, p) = acc;
      }
      // Softmax over beams, in place.
      double peak = logits(b, 0);
      for (int p = 1; p < beams; ++p) peak = std::max(peak, logits(b, p));
      double sum = 0.0;
      for (int p = 0; p < beams; ++p) {
        logits(b, p) = std::exp(logits(b, p) - peak);
        sum += logits(b, p);
      }
      for (int p = 0; p < beams; ++p) logits(b, p) /= sum;
    }
  }

  // Each bin takes its band's weights.
  mask.resize(beams, hd.bins);
  for (int k = 0; k < hd.bins; ++k) {
    const int b = params.erb.band_of_bin[k];
    for (int p = 0; p < beams; ++p) mask(p, k) = logits(b, p);
  }
  ++state.frame_count_;
}

std::vector<Complex> FuseFrame(const RMatrix& mask, const CMatrix& beam_frame) {
  if (mask.rows() != beam_frame.cols() || mask.cols() != beam_frame.rows()) {
    throw Error("mask shape does not match the beam frame");
  }
  const int bins = static_cast<int>(beam_frame.rows());
  const int beams = static_cast<int>(beam_frame.cols());
  std::vector<Complex> out(bins);
  for (int k = 0; k < bins; ++k) {
    Complex acc(0.0, 0.0);
    for (int p = 0; p < beams; ++p) acc += mask(p, k) * beam_frame(k, p);
    out[k] = acc;
  }
  return out;
}

CMatrix GatherFrame(const std::vector<Spectrogram>& beams, int t) {
  CMatrix frame(beams[0].bins(), static_cast<Eigen::Index>(beams.size()));
  for (std::size_t p = 0; p < beams.size(); ++p) {
    frame.col(static_cast<Eigen::Index>(p)) = beams[p].data.row(t).transpose();
  }
  return frame;
}

namespace {

void CheckBeams(const ModelParams& params, const std::vector<Spectrogram>& beams) {
  params.Validate();
  if (static_cast<int>(beams.size()) != params.header.beams) {
    throw Error("model expects " + std::to_string(params.header.beams) +
                " beams, got " + std::to_string(beams.size()));
  }
  for (const Spectrogram& b : beams) {
    if (b.bins() != params.header.bins || b.frames() != beams[0].frames()) {
      throw Error("beam spectrograms do not match the model grid");
    }
    if (!(b.config == params.header.stft)) {
      throw Error("beam STFT configuration differs from the model's");
    }
  }
}

}  // namespace

WeightTrajectory InferMasks(const ModelParams& params,
                            const std::vector<Spectrogram>& beams, Exec exec) {
  CheckBeams(params, beams);
  const int frames = beams[0].frames();
  const int bins = params.header.bins;
  const int num_beams = params.header.beams;
  WeightTrajectory traj(frames, bins, num_beams);
  FusionState state(params);
  RMatrix mask;
  for (int t = 0; t < frames; ++t) {
    const RMatrix feats = ExtractFeatures(GatherFrame(beams, t), params.erb);
    InferFrame(params, state, feats, mask, exec);
    for (int k = 0; k < bins; ++k) {
      for (int p = 0; p < num_beams; ++p) traj.at(t, k, p) = mask(p, k);
    }
  }
  return traj;
}

EnhanceResult EnhanceStream(const ModelParams& params,
                            const std::vector<Spectrogram>& beams,
                            std::size_t length, Exec exec) {
  CheckBeams(params, beams);
  const StftConfig& cfg = params.header.stft;
  const int frames = beams[0].frames();
  const int bins = params.header.bins;
  const int num_beams = params.header.beams;

  EnhanceResult res;
  res.masks = WeightTrajectory(frames, bins, num_beams);
  res.fused.config = cfg;
  res.fused.data.resize(frames, bins);

  FusionState state(params);
  StreamingSynthesizer synth(cfg);
  std::vector<double> padded(static_cast<std::size_t>(frames) * cfg.hop + cfg.padding());
  RMatrix mask;
  for (int t = 0; t < frames; ++t) {
    const CMatrix frame = GatherFrame(beams, t);
    InferFrame(params, state, ExtractFeatures(frame, params.erb), mask, exec);
    const std::vector<Complex> fused = FuseFrame(mask, frame);
    synth.Push(fused, std::span<double>(padded).subspan(
                          static_cast<std::size_t>(t) * cfg.hop, cfg.hop));
    for (int k = 0; k < bins; ++k) {
      res.fused.data(t, k) = fused[k];
      for (int p = 0; p < num_beams; ++p) res.masks.at(t, k, p) = mask(p, k);
    }
  }
  if (frames > 0) {
    synth.Flush(std::span<double>(padded).subspan(
        static_cast<std::size_t>(frames) * cfg.hop, cfg.padding()));
  }
  res.signal.assign(length, 0.0);
  for (std::size_t i = 0; i < length && i + cfg.padding() < padded.size(); ++i) {
    res.signal[i] = padded[i + cfg.padding()];
  }
  return res;
}

}  // namespace beamfusion
