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

#include "beamfusion/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "beamfusion/kernels.h"

namespace beamfusion {

double CappedDb(double num, double den) {
  if (num <= 0.0 && den <= 0.0) return 0.0;
  if (den <= 0.0) return kDbCap;
  if (num <= 0.0) return -kDbCap;
  return std::clamp(10.0 * std::log10(num / den), -kDbCap, kDbCap);
}

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

std::vector<double> ShadowProcess(const FilterBank& bank,
                                  const WeightTrajectory& weights,
                                  const std::vector<std::vector<double>>& signal,
                                  const StftConfig& cfg, Exec exec) {
  if (signal.empty()) throw Error("shadow process: no channels");
  const auto spec = AnalyzeMultichannel(signal, cfg, exec);
  const auto beams = ApplyBank(bank, spec, exec);
  if (weights.frames != spec.frames() || weights.bins != spec.bins() ||
      weights.beams != static_cast<int>(beams.size())) {
    throw Error("shadow process: weight trajectory is " +
                std::to_string(weights.frames) + "x" + std::to_string(weights.bins) +
                "x" + std::to_string(weights.beams) + ", signal gives " +
                std::to_string(spec.frames()) + "x" + std::to_string(spec.bins()) +
                "x" + std::to_string(beams.size()));
  }
  return SynthesizeAligned(FuseTrajectory(beams, weights, exec), signal[0].size(), exec);
}

double DeltaSnr(std::span<const double> target_in, std::span<const double> noise_in,
                std::span<const double> target_out, std::span<const double> noise_out) {
  return CappedDb(Energy(target_out), Energy(noise_out)) -
         CappedDb(Energy(target_in), Energy(noise_in));
}

double SiSdr(std::span<const double> est, std::span<const double> ref) {
  if (est.size() != ref.size()) throw Error("si-sdr: length mismatch");
  const double ref_energy = Energy(ref);
  if (!(ref_energy > 0.0)) throw Error("si-sdr: silent reference");
  double dot = 0.0;
  for (std::size_t n = 0; n < ref.size(); ++n) dot += est[n] * ref[n];
  const double scale = dot / ref_energy;
  double target = 0.0, residual = 0.0;
  for (std::size_t n = 0; n < ref.size(); ++n) {
    const double s = scale * ref[n];
    const double e = est[n] - s;
    target += s * s;
    residual += e * e;
  }
  return CappedDb(target, residual);
}

namespace {

// Gram block between shifted copies: entry (i, j) = sum_n a[n - i] b[n - j]
// over the zero-padded support, which only depends on j - i.
Eigen::MatrixXd GramBlock(std::span<const double> a, std::span<const double> b, int len,
                          Exec exec) {
  const auto ab = kernels::CrossCorrelate(a, b, len, exec);  // sum a[n] b[n - l]
  const auto ba = kernels::CrossCorrelate(b, a, len, exec);
  Eigen::MatrixXd g(len, len);
  for (int i = 0; i < len; ++i) {
    for (int j = 0; j < len; ++j) g(i, j) = j >= i ? ab[j - i] : ba[i - j];
  }
  return g;
}

std::vector<double> FilterRef(std::span<const double> ref, const double* coeffs,
                               int len, std::size_t out_len) {
  return kernels::ConvolveFft(ref, std::span<const double>(coeffs, len), out_len);
}

}  // namespace

BssSirResult BssSir(std::span<const double> est, std::span<const double> ref_target,
                    std::span<const double> ref_interf, int filter_len,
                    Exec exec) {
  if (est.size() != ref_target.size() || est.size() != ref_interf.size()) {
    throw Error("bss sir: length mismatch");
  }
  if (filter_len < 1) throw Error("bss sir: filter length must be positive");
  if (!(Energy(ref_target) > 0.0) || !(Energy(ref_interf) > 0.0)) {
    throw Error("bss sir: silent reference");
  }
  const int L = filter_len;
  // The estimate is zero-padded by L - 1 samples so every shifted copy
  // lies fully inside the support and the Gram blocks are Toeplitz.
  const std::size_t out_len = est.size() + L - 1;

  Eigen::MatrixXd g(2 * L, 2 * L);
  g.topLeftCorner(L, L) = GramBlock(ref_target, ref_target, L, exec);
  g.bottomRightCorner(L, L) = GramBlock(ref_interf, ref_interf, L, exec);
  g.topRightCorner(L, L) = GramBlock(ref_target, ref_interf, L, exec);
  g.bottomLeftCorner(L, L) = g.topRightCorner(L, L).transpose();

  Eigen::VectorXd rhs(2 * L);
  const auto bt = kernels::CrossCorrelate(est, ref_target, L, exec);
  const auto bi = kernels::CrossCorrelate(est, ref_interf, L, exec);
  for (int l = 0; l < L; ++l) {
    rhs(l) = bt[l];
    rhs(L + l) = bi[l];
  }

  const auto solve = [](Eigen::MatrixXd m, const Eigen::VectorXd& b) {
    const double lambda = 1e-8 * m.trace();
    m.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw Error("bss sir: Gram system is not positive definite");
    return Eigen::VectorXd(llt.solve(b));
  };
  const Eigen::VectorXd c_target = solve(g.topLeftCorner(L, L), rhs.head(L));
  const Eigen::VectorXd c_joint = solve(g, rhs);

  const auto s_target = FilterRef(ref_target, c_target.data(), L, out_len);
  const auto joint_t = FilterRef(ref_target, c_joint.data(), L, out_len);
  const auto joint_i = FilterRef(ref_interf, c_joint.data() + L, L, out_len);

  BssSirResult out;
  for (std::size_t n = 0; n < out_len; ++n) {
    const double e = joint_t[n] + joint_i[n] - s_target[n];
    out.target_energy += s_target[n] * s_target[n];
    out.interference_energy += e * e;
  }
  out.sir_db = CappedDb(out.target_energy, out.interference_energy);
  return out;
}

std::string MetricReportsToJson(const std::vector<MetricReport>& reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    doc.push_back({{"method", r.method},
                   {"t60_s", r.t60_s},
                   {"snr_db", r.snr_db},
                   {"delta_snr_db", r.delta_snr_db},
                   {"si_sdr_db", r.si_sdr_db},
                   {"delta_si_sdr_db", r.delta_si_sdr_db},
                   {"sir_db", r.sir_db}});
  }
  return nlohmann::ordered_json{{"db_cap", kDbCap}, {"reports", doc}}.dump(2) + "\n";
}

std::string SirCurveToCsv(const std::vector<SirPoint>& points) {
  std::string out = "angle_deg,sir_db,n_trials\n";
  char line[96];
  for (const auto& p : points) {
    std::snprintf(line, sizeof(line), "%.1f,%.6f,%d\n", p.angle_deg, p.sir_db, p.n_trials);
    out += line;
  }
  return out;
}

}  // namespace beamfusion
