// Copyright (c) 2026 The biogate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIOGATE_SPEAKER_NET_H_
#define BIOGATE_SPEAKER_NET_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biogate/fbank.h"
#include "biogate/model.h"
#include "biogate/tensor.h"

namespace biogate {

// Residual CNN speaker embedder. Each stage is a stride-2 convolution
// followed by `blocks_per_stage` bottleneck blocks (1x1, kxk, 1x1 with an
// identity skip); the stages are followed by a mean over time, an affine
// projection and L2 normalization.
struct SpeakerNetSpec {
  int64_t n_mels = 64;
  std::vector<int64_t> channels = {64, 128, 256, 512};
  int64_t blocks_per_stage = 3;
  int64_t stage_kernel = 5;
  int64_t stage_stride = 2;
  int64_t block_kernel = 3;
  int64_t embedding_dim = 512;
  int64_t affine_in = 2048;

  static SpeakerNetSpec Full();
  // Same topology with channels 8, 16, 32, 64.
  static SpeakerNetSpec Toy();

  int64_t FrequencyAfterStages() const;
  // Shortest input that leaves at least one time step after all stages.
  int64_t MinFrames() const;
  // Throws kSpec when the frequency chain does not reach affine_in.
  void Validate() const;

  std::string ToManifest() const;
  static SpeakerNetSpec FromManifest(const std::string& text);

  bool operator==(const SpeakerNetSpec&) const = default;
};

struct Embedding {
  std::vector<double> values;

  size_t dim() const { return values.size(); }
  double Norm() const;

  bool operator==(const Embedding&) const = default;
};

// Dot product of two unit embeddings.
double CosineSimilarity(const Embedding& a, const Embedding& b);
// L2-normalized element-wise mean. Throws kDegenerateVector if it is zero.
Embedding MeanEmbedding(std::span<const Embedding> embeddings);

using ShapeTrace = std::vector<std::pair<std::string, Shape>>;

class SpeakerNet {
 public:
  // Deterministic fan-in-scaled initialization from `seed`.
  static SpeakerNet Build(const SpeakerNetSpec& spec, uint64_t seed);
  // All-zero parameters with the right names and shapes.
  static SpeakerNet Skeleton(const SpeakerNetSpec& spec);

  const SpeakerNetSpec& spec() const { return spec_; }
  ParameterList& params() { return params_; }
  const ParameterList& params() const { return params_; }

  // input [1, n_mels, T] -> unit embedding [embedding_dim]. Records a graph
  // unless a NoGradGuard is active. `trace` receives each stage's output.
  Tensor Forward(const Tensor& input, ShapeTrace* trace = nullptr) const;

  // Inference entry point. Throws kTooShort below MinFrames().
  Embedding Embed(const FeatureMatrix& features) const;

  ParamReport CountParams() const;

  // Independent deep copy.
  SpeakerNet Clone() const;

 private:
  SpeakerNet() = default;
  std::string StageName(size_t stage) const;

  SpeakerNetSpec spec_;
  ParameterList params_;
};

}  // namespace biogate

#endif  // BIOGATE_SPEAKER_NET_H_
