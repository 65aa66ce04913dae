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

#include <map>
#include <string>

#include "beamfusion/fusion.h"
#include "beamfusion/tensor_file.h"

namespace beamfusion {
namespace {

constexpr char kMagic[] = "BFW1";
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 10 * 4;

Tensor FromMatrix(const std::string& name, const RMatrix& m) {
  Tensor t;
  t.name = name;
  t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  t.values.assign(m.data(), m.data() + m.size());
  return t;
}

Tensor FromVector(const std::string& name, const RVector& v) {
  Tensor t;
  t.name = name;
  t.dims = {static_cast<std::uint32_t>(v.size())};
  t.values.assign(v.data(), v.data() + v.size());
  return t;
}

const Tensor& Take(const std::map<std::string, const Tensor*>& by_name,
                   const std::string& name, std::vector<std::uint32_t> dims) {
  const auto it = by_name.find(name);
  if (it == by_name.end()) throw FormatError("missing tensor " + name);
  if (it->second->dims != dims) {
    throw FormatError("tensor " + name + " shape is inconsistent with the header");
  }
  return *it->second;
}

RMatrix ToMatrix(const Tensor& t) {
  RMatrix m(t.dims[0], t.dims[1]);
  std::copy(t.values.begin(), t.values.end(), m.data());
  return m;
}

RVector ToVector(const Tensor& t) {
  RVector v(t.dims[0]);
  std::copy(t.values.begin(), t.values.end(), v.data());
  return v;
}

}  // namespace

std::string EncodeModel(const ModelParams& params) {
  params.Validate();
  const ModelHeader& hd = params.header;
  ByteWriter h;
  h.U32(static_cast<std::uint32_t>(hd.beams));
  h.U32(static_cast<std::uint32_t>(hd.bins));
  h.U32(static_cast<std::uint32_t>(hd.bands));
  h.U32(static_cast<std::uint32_t>(hd.hidden));
  h.U32(static_cast<std::uint32_t>(hd.knee));
  h.U32(static_cast<std::uint32_t>(hd.stft.nfft));
  h.U32(static_cast<std::uint32_t>(hd.stft.window_len));
  h.U32(static_cast<std::uint32_t>(hd.stft.hop));
  h.U32(static_cast<std::uint32_t>(hd.stft.window));
  h.U32(static_cast<std::uint32_t>(hd.sample_rate));

  std::vector<Tensor> tensors;
  tensors.push_back(FromMatrix("enc/W", params.enc_w));
  tensors.push_back(FromVector("enc/b", params.enc_b));
  for (const auto& [tag, g] : {std::pair<const char*, const GruWeights*>{"intra", &params.intra},
                               {"inter", &params.inter}}) {
    const std::string p = tag;
    tensors.push_back(FromMatrix(p + "/Wz", g->wz));
    tensors.push_back(FromMatrix(p + "/Wr", g->wr));
    tensors.push_back(FromMatrix(p + "/Wh", g->wh));
    tensors.push_back(FromVector(p + "/bz", g->bz));
    tensors.push_back(FromVector(p + "/br", g->br));
    tensors.push_back(FromVector(p + "/bh", g->bh));
    if (p == "intra") tensors.push_back(FromMatrix("intra/proj", params.intra_proj));
  }
  tensors.push_back(FromMatrix("dec/W", params.dec_w));
  tensors.push_back(FromVector("dec/b", params.dec_b));
  return EncodeTensorFile(kMagic, kVersion, h.data(), tensors, ElementType::kFloat32);
}

ModelParams DecodeModel(const std::string& bytes) {
  const TensorFileContents contents =
      DecodeTensorFile(bytes, kMagic, kVersion, kHeaderSize, ElementType::kFloat32);
  ByteReader h(contents.header);
  ModelHeader hd;
  hd.beams = static_cast<int>(h.U32());
  hd.bins = static_cast<int>(h.U32());
  hd.bands = static_cast<int>(h.U32());
  hd.hidden = static_cast<int>(h.U32());
  hd.knee = static_cast<int>(h.U32());
  hd.stft.nfft = static_cast<int>(h.U32());
  hd.stft.window_len = static_cast<int>(h.U32());
  hd.stft.hop = static_cast<int>(h.U32());
  hd.stft.window = static_cast<WindowKind>(h.U32());
  hd.sample_rate = static_cast<int>(h.U32());
  try {
    hd.Validate();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("bad model header: ") + e.what());
  }

  std::map<std::string, const Tensor*> by_name;
  for (const Tensor& t : contents.tensors) {
    if (!by_name.emplace(t.name, &t).second) {
      throw FormatError("duplicate tensor " + t.name);
    }
  }
  const auto p = static_cast<std::uint32_t>(hd.beams);
  const auto d = static_cast<std::uint32_t>(hd.hidden);
  ModelParams m = ModelParams::Zeros(hd);
  m.enc_w = ToMatrix(Take(by_name, "enc/W", {d, 3 * p}));
  m.enc_b = ToVector(Take(by_name, "enc/b", {d}));
  for (const auto& [tag, g] : {std::pair<const char*, GruWeights*>{"intra", &m.intra},
                               {"inter", &m.inter}}) {
    const std::string pre = tag;
    g->wz = ToMatrix(Take(by_name, pre + "/Wz", {d, 2 * d}));
    g->wr = ToMatrix(Take(by_name, pre + "/Wr", {d, 2 * d}));
    g->wh = ToMatrix(Take(by_name, pre + "/Wh", {d, 2 * d}));
    g->bz = ToVector(Take(by_name, pre + "/bz", {d}));
    g->br = ToVector(Take(by_name, pre + "/br", {d}));
    g->bh = ToVector(Take(by_name, pre + "/bh", {d}));
  }
  m.intra_proj = ToMatrix(Take(by_name, "intra/proj", {d, d}));
  m.dec_w = ToMatrix(Take(by_name, "dec/W", {p, d}));
  m.dec_b = ToVector(Take(by_name, "dec/b", {p}));
  if (contents.tensors.size() != 17) {
    throw FormatError("model file holds unexpected extra tensors");
  }
  try {
    m.Validate();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("bad model tensors: ") + e.what());
  }
  return m;
}

void SaveModel(const ModelParams& params, const std::string& path) {
  WriteFileBytes(path, EncodeModel(params));
}

ModelParams LoadModel(const std::string& path) {
  return DecodeModel(ReadFileBytes(path));
}

}  // namespace beamfusion
