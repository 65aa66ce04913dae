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

#ifndef BEAMFUSION_TENSOR_FILE_H_
#define BEAMFUSION_TENSOR_FILE_H_

// Little-endian tensor container shared by the model-weight ("BFW1") and
// filter-bank ("BFB1") files:
//
//   char[4] magic | u32 version | fixed-size header | u32 tensor count |
//   per tensor: u16 name length, UTF-8 name, u8 rank, u32 dims[rank],
//               row-major values (f32 or f64, fixed per format)

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "beamfusion/common.h"

namespace beamfusion {

enum class ElementType { kFloat32, kFloat64 };

struct Tensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<double> values;

  std::size_t numel() const;
};

class ByteWriter {
 public:
  void U8(std::uint8_t v);
  void U16(std::uint16_t v);
  void U32(std::uint32_t v);
  void F32(float v);
  void F64(double v);
  void Raw(std::string_view bytes);
  const std::string& data() const { return data_; }

 private:
  std::string data_;
};

// Throws FormatError on reads past the end.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}
  std::uint8_t U8();
  std::uint16_t U16();
  std::uint32_t U32();
  float F32();
  double F64();
  std::string_view Raw(std::size_t n);
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

struct TensorFileContents {
  std::string header;  // the fixed-size header bytes
  std::vector<Tensor> tensors;
};

std::string EncodeTensorFile(std::string_view magic, std::uint32_t version,
                             std::string_view header,
                             const std::vector<Tensor>& tensors,
                             ElementType type);

// Throws FormatError on magic/version mismatch, truncation or trailing bytes.
TensorFileContents DecodeTensorFile(std::string_view bytes,
                                    std::string_view magic,
                                    std::uint32_t version,
                                    std::size_t header_size, ElementType type);

std::string ReadFileBytes(const std::string& path);
// Writes to a temporary sibling and renames it into place.
void WriteFileBytes(const std::string& path, std::string_view bytes);

}  // namespace beamfusion

#endif  // BEAMFUSION_TENSOR_FILE_H_
