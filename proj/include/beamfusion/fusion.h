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

#ifndef BEAMFUSION_FUSION_H_
#define BEAMFUSION_FUSION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "beamfusion/common.h"
#include "beamfusion/erb.h"
#include "beamfusion/stft.h"
#include "beamfusion/weights.h"

namespace beamfusion {

struct ModelHeader {
  int beams = 4;     // P
  int bins = 257;    // F
  int bands = 64;    // F'
  int hidden = 32;   // D
  int knee = 32;     // K
  StftConfig stft;
  int sample_rate = 16000;

  void Validate() const;
  bool operator==(const ModelHeader&) const = default;
};

// Gated recurrent cell acting on the concatenation [x; h]:
//   z = sigmoid(Wz [x; h] + bz)       r = sigmoid(Wr [x; h] + br)
//   c = tanh(Wh [x; r * h] + bh)      h' = (1 - z) * h + z * c
struct GruWeights {
  RMatrix wz, wr, wh;  // D x 2D
  RVector bz, br, bh;  // D
};

struct ModelParams {
  ModelHeader header;
  RMatrix enc_w;  // D x 3P
  RVector enc_b;  // D
  GruWeights intra;
  RMatrix intra_proj;  // D x D
  GruWeights inter;
  RMatrix dec_w;  // P x D
  RVector dec_b;  // P
  ErbBank erb;    // derived from the header

  // Throws Error on inconsistent shapes or non-finite values.
  void Validate() const;

  // All-zero weights: the decoder emits zero logits, so the mask is uniform.
  static ModelParams Zeros(const ModelHeader& header);
  // Uniform values in [-scale, scale], rounded to float32 so that they
  // survive a save/load round trip unchanged.
  static ModelParams Random(const ModelHeader& header, std::uint64_t seed,
                            double scale = 0.3);
};

// Recurrent state carried across frames: one D-vector per band.
class FusionState {
 public:
  FusionState() = default;
  explicit FusionState(const ModelParams& params);

  bool initialized() const { return hidden_.size() > 0; }
  long long frame_count() const { return frame_count_; }
  const RMatrix& hidden() const { return hidden_; }

  void Reset();

 private:
  friend void InferFrame(const ModelParams&, FusionState&, const RMatrix&,
                         RMatrix&, Exec);
  RMatrix hidden_;  // F' x D
  long long frame_count_ = 0;
};

// Features for one frame: rows ordered [re(0..P-1), im(0..P-1), |.|(0..P-1)],
// each compressed to F' bands. `beam_frame` is F x P; result is 3P x F'.
RMatrix ExtractFeatures(const CMatrix& beam_frame, const ErbBank& erb);

// Runs encoder, intra-frame band recurrence, inter-frame recurrence, decoder
// and per-bin softmax on one feature frame; writes the P x F mask and
// advances `state`.
void InferFrame(const ModelParams& params, FusionState& state,
                const RMatrix& features, RMatrix& mask,
                Exec exec = Exec::kSerial);

// S(k) = sum_p W_p(k) Z_p(k) for one frame (mask P x F, beam_frame F x P).
std::vector<Complex> FuseFrame(const RMatrix& mask, const CMatrix& beam_frame);

// F x P matrix holding frame t of every beam.
CMatrix GatherFrame(const std::vector<Spectrogram>& beams, int t);

// Mask trajectory for all frames, from a fresh state.
WeightTrajectory InferMasks(const ModelParams& params,
                            const std::vector<Spectrogram>& beams,
                            Exec exec = Exec::kSerial);

struct EnhanceResult {
  std::vector<double> signal;  // aligned with the analyzed input
  WeightTrajectory masks;
  Spectrogram fused;
};

// Frame-by-frame inference, fusion and overlap-add synthesis. `length` is
// the sample count of the signal the beams were analyzed from.
EnhanceResult EnhanceStream(const ModelParams& params,
                            const std::vector<Spectrogram>& beams,
                            std::size_t length, Exec exec = Exec::kSerial);

// BFW1 weight file; see tensor_file.h for the container layout.
void SaveModel(const ModelParams& params, const std::string& path);
ModelParams LoadModel(const std::string& path);
std::string EncodeModel(const ModelParams& params);
ModelParams DecodeModel(const std::string& bytes);

}  // namespace beamfusion

#endif  // BEAMFUSION_FUSION_H_
