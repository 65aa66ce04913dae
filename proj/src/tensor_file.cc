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

#include "beamfusion/tensor_file.h"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace beamfusion {

std::size_t Tensor::numel() const {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

void ByteWriter::U8(std::uint8_t v) { data_.push_back(static_cast<char>(v)); }

void ByteWriter::U16(std::uint16_t v) {
  for (int i = 0; i < 2; ++i) U8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::U32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) U8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::F64(double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) U8(static_cast<std::uint8_t>(bits >> (8 * i)));
}

void ByteWriter::Raw(std::string_view bytes) { data_.append(bytes); }

std::string_view ByteReader::Raw(std::size_t n) {
  if (n > remaining()) throw FormatError("truncated file");
  std::string_view out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::U8() { return static_cast<std::uint8_t>(Raw(1)[0]); }

std::uint16_t ByteReader::U16() {
  std::uint16_t v = 0;
  for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(U8()) << (8 * i);
  return v;
}

std::uint32_t ByteReader::U32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(U8()) << (8 * i);
  return v;
}

float ByteReader::F32() { return std::bit_cast<float>(U32()); }

double ByteReader::F64() {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(U8()) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::string EncodeTensorFile(std::string_view magic, std::uint32_t version,
                             std::string_view header,
                             const std::vector<Tensor>& tensors,
                             ElementType type) {
  ByteWriter w;
  w.Raw(magic);
  w.U32(version);
  w.Raw(header);
  w.U32(static_cast<std::uint32_t>(tensors.size()));
  for (const Tensor& t : tensors) {
    if (t.name.size() > 0xFFFF) throw Error("tensor name too long: " + t.name);
    if (t.dims.size() > 0xFF) throw Error("tensor rank too large: " + t.name);
    if (t.values.size() != t.numel()) {
      throw Error("tensor " + t.name + " has values inconsistent with its dims");
    }
    w.U16(static_cast<std::uint16_t>(t.name.size()));
    w.Raw(t.name);
    w.U8(static_cast<std::uint8_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) w.U32(d);
    for (double v : t.values) {
      if (type == ElementType::kFloat32) {
        w.F32(static_cast<float>(v));
      } else {
        w.F64(v);
      }
    }
  }
  return w.data();
}

TensorFileContents DecodeTensorFile(std::string_view bytes,
                                    std::string_view magic,
                                    std::uint32_t version,
                                    std::size_t header_size, ElementType type) {
  ByteReader r(bytes);
  if (bytes.size() < magic.size() || r.Raw(magic.size()) != magic) {
    throw FormatError("bad magic, expected " + std::string(magic));
  }
  const std::uint32_t file_version = r.U32();
  if (file_version != version) {
    throw FormatError("unsupported version " + std::to_string(file_version));
  }
  TensorFileContents out;
  out.header = std::string(r.Raw(header_size));
  const std::uint32_t count = r.U32();
  const std::size_t elem = type == ElementType::kFloat32 ? 4 : 8;
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t;
    const std::uint16_t name_len = r.U16();
    t.name = std::string(r.Raw(name_len));
    const std::uint8_t rank = r.U8();
    for (std::uint8_t d = 0; d < rank; ++d) t.dims.push_back(r.U32());
    const std::size_t n = t.numel();
    if (n > r.remaining() / elem) throw FormatError("truncated tensor " + t.name);
    t.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      t.values[j] = type == ElementType::kFloat32 ? r.F32() : r.F64();
    }
    out.tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after last tensor");
  return out;
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::remove(tmp.c_str());
      throw Error("write failed for " + path);
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace beamfusion
