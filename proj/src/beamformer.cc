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

#include "beamfusion/beamformer.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "beamfusion/kernels.h"
#include "beamfusion/tensor_file.h"

namespace beamfusion {
namespace {

constexpr double kRegularization = 1e-8;   // times trace(C^H C) / 2
constexpr double kMinReciprocalCond = 1e-12;
constexpr int kMaxRefinements = 20;

const char* const kRoman[] = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};

std::string DmaLabel(int index) {
  if (index < 8) return std::string("DMA-") + kRoman[index];
  return "DMA-" + std::to_string(index + 1);
}

FixedFilter MakeShell(const ArrayGeometry& geom, const FrequencyGrid& grid,
                      double theta_s) {
  geom.Validate();
  grid.Validate();
  if (grid.sample_rate != geom.sample_rate) {
    throw Error("grid and array sample rates differ");
  }
  if (!std::isfinite(theta_s)) throw Error("look direction must be finite");
  FixedFilter f;
  f.geometry = geom;
  f.grid = grid;
  f.theta_s = theta_s;
  f.coeffs.resize(grid.num_bins(), geom.num_mics);
  return f;
}

// Solves the 2-constraint minimum-norm problem at one bin. Returns false
// when the constraint Gram matrix is too ill-conditioned to use.
bool SolveTwoConstraint(const Eigen::VectorXcd& d_s,
                        const Eigen::VectorXcd& d_n, Eigen::VectorXcd& h) {
  Eigen::MatrixXcd c(d_s.size(), 2);
  c.col(0) = d_s;
  c.col(1) = d_n;
  const Eigen::Matrix2cd gram = c.adjoint() * c;
  const double eps = kRegularization * gram.trace().real() / 2.0;
  const Eigen::Matrix2cd reg = gram + eps * Eigen::Matrix2cd::Identity();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(reg, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(1);
  if (!(lmax > 0.0) || lmin / lmax < kMinReciprocalCond) return false;

  // Regularized solve, then iterative refinement against the unregularized
  // constraints; converges to the exact minimum-norm solution.
  const Eigen::Matrix2cd reg_inv = reg.inverse();
  const Eigen::Vector2cd target(1.0, 0.0);
  Eigen::Vector2cd a = reg_inv * target;
  for (int it = 0; it < kMaxRefinements; ++it) {
    const Eigen::Vector2cd resid = target - gram * a;
    if (resid.norm() < 1e-15) break;
    a += reg_inv * resid;
  }
  h = c * a;
  return true;
}

}  // namespace

bool FixedFilter::IsFallback(int bin) const {
  return std::find(fallback_bins.begin(), fallback_bins.end(), bin) !=
         fallback_bins.end();
}

void FilterBank::Validate() const {
  if (filters.size() < 2) throw Error("filter bank needs at least 2 filters");
  const FixedFilter& first = filters[0];
  for (const FixedFilter& f : filters) {
    if (f.theta_s != first.theta_s) {
      throw Error("filter " + f.label + " has a different look direction");
    }
    if (f.geometry.num_mics != first.geometry.num_mics ||
        f.geometry.spacing != first.geometry.spacing ||
        f.geometry.sample_rate != first.geometry.sample_rate ||
        f.grid.nfft != first.grid.nfft) {
      throw Error("filter " + f.label + " has a different geometry or grid");
    }
    if (f.coeffs.rows() != f.grid.num_bins() ||
        f.coeffs.cols() != f.geometry.num_mics) {
      throw Error("filter " + f.label + " has malformed coefficients");
    }
  }
}

FixedFilter DesignMwng(const ArrayGeometry& geom, const FrequencyGrid& grid,
                       double theta_s) {
  FixedFilter f = MakeShell(geom, grid, theta_s);
  f.label = "MWNG";
  f.coeffs = SteeringMatrix(geom, grid, theta_s) / static_cast<double>(geom.num_mics);
  return f;
}

FixedFilter DesignNullDma(const ArrayGeometry& geom, const FrequencyGrid& grid,
                          double theta_s, double theta_null,
                          std::string label) {
  FixedFilter f = MakeShell(geom, grid, theta_s);
  if (!std::isfinite(theta_null)) throw Error("null direction must be finite");
  if (std::abs(std::cos(theta_null) - std::cos(theta_s)) < 1e-12) {
    throw Error("null direction coincides with the look direction");
  }
  f.label = label.empty() ? "DMA" : std::move(label);
  f.theta_null = theta_null;
  const CMatrix ds = SteeringMatrix(geom, grid, theta_s);
  const CMatrix dn = SteeringMatrix(geom, grid, theta_null);
  const int bins = grid.num_bins();
  std::vector<char> fallback(bins, 0);

#pragma omp parallel for schedule(static)
  for (int k = 0; k < bins; ++k) {
    const Eigen::VectorXcd d_s = ds.row(k).transpose();
    const Eigen::VectorXcd d_n = dn.row(k).transpose();
    Eigen::VectorXcd h;
    // At DC both steering vectors are all-ones and the constraints conflict.
    if (k == 0 || !SolveTwoConstraint(d_s, d_n, h)) {
      h = d_s / static_cast<double>(geom.num_mics);
      fallback[k] = 1;
    }
    f.coeffs.row(k) = h.transpose();
  }
  for (int k = 0; k < bins; ++k) {
    if (fallback[k]) f.fallback_bins.push_back(k);
  }
  return f;
}

FilterBank DesignDmaBank(const ArrayGeometry& geom, const FrequencyGrid& grid,
                         double theta_s, std::span<const double> nulls,
                         bool include_mwng) {
  FilterBank bank;
  if (include_mwng) bank.filters.push_back(DesignMwng(geom, grid, theta_s));
  for (std::size_t i = 0; i < nulls.size(); ++i) {
    bank.filters.push_back(DesignNullDma(geom, grid, theta_s, nulls[i],
                                         DmaLabel(static_cast<int>(i))));
  }
  bank.Validate();
  return bank;
}

double WhiteNoiseGain(const FixedFilter& filter, int bin, double theta) {
  const SteeringVector sv =
      ComputeSteeringVector(filter.geometry, filter.grid.bin_freq(bin), theta);
  Complex response(0.0, 0.0);
  double energy = 0.0;
  for (int m = 0; m < filter.geometry.num_mics; ++m) {
    response += std::conj(filter.coeffs(bin, m)) * sv.entries[m];
    energy += std::norm(filter.coeffs(bin, m));
  }
  return std::norm(response) / energy;
}

Beampattern ComputeBeampattern(const FixedFilter& filter, double freq,
                               std::span<const double> thetas) {
  const double step = filter.grid.sample_rate / filter.grid.nfft;
  const int bin = static_cast<int>(std::lround(freq / step));
  if (bin < 0 || bin >= filter.grid.num_bins() ||
      std::abs(bin * step - freq) > 1e-9 * filter.grid.sample_rate) {
    throw Error("frequency " + std::to_string(freq) + " Hz is not on the grid");
  }
  Beampattern bp;
  bp.thetas.assign(thetas.begin(), thetas.end());
  for (double theta : thetas) {
    const SteeringVector sv = ComputeSteeringVector(filter.geometry, freq, theta);
    Complex response(0.0, 0.0);
    for (int m = 0; m < filter.geometry.num_mics; ++m) {
      response += std::conj(filter.coeffs(bin, m)) * sv.entries[m];
    }
    const double mag = std::abs(response);
    bp.magnitude.push_back(mag);
    bp.magnitude_db.push_back(
        20.0 * std::log10(std::max(mag, std::numeric_limits<double>::min())));
  }
  return bp;
}

Spectrogram ApplyFilter(const FixedFilter& filter,
                        const MultichannelSpectrogram& input, Exec exec) {
  if (input.num_channels() != filter.geometry.num_mics) {
    throw Error("filter " + filter.label + " expects " +
                std::to_string(filter.geometry.num_mics) + " channels, got " +
                std::to_string(input.num_channels()));
  }
  if (input.channels[0].config.nfft != filter.grid.nfft) {
    throw Error("spectrogram FFT size does not match filter grid");
  }
  std::vector<const CMatrix*> channels;
  for (const Spectrogram& s : input.channels) {
    if (!(s.config == input.channels[0].config)) {
      throw Error("channels use different STFT configurations");
    }
    channels.push_back(&s.data);
  }
  Spectrogram out;
  out.config = input.channels[0].config;
  kernels::Beamform(filter.coeffs, channels, out.data, exec);
  return out;
}

std::vector<Spectrogram> ApplyBank(const FilterBank& bank,
                                   const MultichannelSpectrogram& input,
                                   Exec exec) {
  std::vector<Spectrogram> out;
  out.reserve(bank.filters.size());
  for (const FixedFilter& f : bank.filters) out.push_back(ApplyFilter(f, input, exec));
  return out;
}

namespace {
constexpr char kBankMagic[] = "BFB1";
constexpr std::uint32_t kBankVersion = 1;
constexpr std::size_t kBankHeaderSize = 4 + 8 + 8 + 8 + 4 + 8 + 4;
}  // namespace

void SaveFilterBank(const FilterBank& bank, const std::string& path) {
  bank.Validate();
  const FixedFilter& first = bank.filters[0];
  ByteWriter header;
  header.U32(static_cast<std::uint32_t>(first.geometry.num_mics));
  header.F64(first.geometry.spacing);
  header.F64(first.geometry.sound_speed);
  header.F64(first.geometry.sample_rate);
  header.U32(static_cast<std::uint32_t>(first.grid.nfft));
  header.F64(RadToDeg(first.theta_s));
  header.U32(static_cast<std::uint32_t>(bank.size()));

  std::vector<Tensor> tensors;
  for (const FixedFilter& f : bank.filters) {
    Tensor coeffs;
    coeffs.name = "filter/" + f.label + "/coeffs";
    coeffs.dims = {static_cast<std::uint32_t>(f.coeffs.rows()),
                   static_cast<std::uint32_t>(f.coeffs.cols()), 2};
    coeffs.values.reserve(coeffs.numel());
    for (Eigen::Index k = 0; k < f.coeffs.rows(); ++k) {
      for (Eigen::Index m = 0; m < f.coeffs.cols(); ++m) {
        coeffs.values.push_back(f.coeffs(k, m).real());
        coeffs.values.push_back(f.coeffs(k, m).imag());
      }
    }
    Tensor null_deg;
    null_deg.name = "filter/" + f.label + "/theta_null_deg";
    null_deg.dims = {1};
    null_deg.values = {f.theta_null ? RadToDeg(*f.theta_null)
                                    : std::numeric_limits<double>::quiet_NaN()};
    tensors.push_back(std::move(coeffs));
    tensors.push_back(std::move(null_deg));
  }
  WriteFileBytes(path, EncodeTensorFile(kBankMagic, kBankVersion, header.data(),
                                        tensors, ElementType::kFloat64));
}

FilterBank LoadFilterBank(const std::string& path) {
  const std::string bytes = ReadFileBytes(path);
  const TensorFileContents contents = DecodeTensorFile(
      bytes, kBankMagic, kBankVersion, kBankHeaderSize, ElementType::kFloat64);
  ByteReader h(contents.header);
  ArrayGeometry geom;
  geom.num_mics = static_cast<int>(h.U32());
  geom.spacing = h.F64();
  geom.sound_speed = h.F64();
  geom.sample_rate = h.F64();
  FrequencyGrid grid;
  grid.nfft = static_cast<int>(h.U32());
  grid.sample_rate = geom.sample_rate;
  const double theta_s = DegToRad(h.F64());
  const std::uint32_t count = h.U32();
  geom.Validate();
  grid.Validate();
  if (contents.tensors.size() != 2 * static_cast<std::size_t>(count)) {
    throw FormatError("filter count in header does not match tensors");
  }
  FilterBank bank;
  for (std::uint32_t i = 0; i < count; ++i) {
    const Tensor& coeffs = contents.tensors[2 * i];
    const Tensor& null_deg = contents.tensors[2 * i + 1];
    const std::string prefix = "filter/";
    const std::string suffix = "/coeffs";
    if (coeffs.name.rfind(prefix, 0) != 0 || coeffs.name.size() <= prefix.size() + suffix.size() ||
        coeffs.name.compare(coeffs.name.size() - suffix.size(), suffix.size(), suffix) != 0) {
      throw FormatError("unexpected tensor name " + coeffs.name);
    }
    FixedFilter f;
    f.label = coeffs.name.substr(prefix.size(),
                                 coeffs.name.size() - prefix.size() - suffix.size());
    if (null_deg.name != "filter/" + f.label + "/theta_null_deg" ||
        null_deg.numel() != 1) {
      throw FormatError("missing null direction for filter " + f.label);
    }
    if (coeffs.dims != std::vector<std::uint32_t>{
                           static_cast<std::uint32_t>(grid.num_bins()),
                           static_cast<std::uint32_t>(geom.num_mics), 2}) {
      throw FormatError("filter " + f.label + " shape does not match header");
    }
    f.geometry = geom;
    f.grid = grid;
    f.theta_s = theta_s;
    if (std::isfinite(null_deg.values[0])) f.theta_null = DegToRad(null_deg.values[0]);
    f.coeffs.resize(grid.num_bins(), geom.num_mics);
    for (int k = 0; k < grid.num_bins(); ++k) {
      for (int m = 0; m < geom.num_mics; ++m) {
        const std::size_t idx = (static_cast<std::size_t>(k) * geom.num_mics + m) * 2;
        f.coeffs(k, m) = Complex(coeffs.values[idx], coeffs.values[idx + 1]);
      }
    }
    // Fallback bins are not stored; recover them from the h = d / M pattern.
    if (f.theta_null) {
      const CMatrix ds = SteeringMatrix(geom, grid, theta_s) /
                         static_cast<double>(geom.num_mics);
      for (int k = 0; k < grid.num_bins(); ++k) {
        if ((f.coeffs.row(k) - ds.row(k)).norm() < 1e-15) f.fallback_bins.push_back(k);
      }
    }
    bank.filters.push_back(std::move(f));
  }
  bank.Validate();
  return bank;
}

}  // namespace beamfusion
