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


#ifndef BIOGATE_FACE_NET_H_
#define BIOGATE_FACE_NET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "biogate/image.h"
#include "biogate/model.h"
#include "biogate/speaker_net.h"
#include "biogate/tensor.h"

namespace biogate {

struct FaceNetSpec {
  int64_t input_size = 224;
  // Conv output channels per stage; each stage ends in a 2x2 max pool.
  std::vector<std::vector<int64_t>> stages = {
      {64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512, 512, 512}};
  int64_t kernel = 3;
  int64_t hidden = 512;
  int64_t num_classes = 5;

  static FaceNetSpec Full(int64_t num_classes);
  // Channels divided by 8, 56x56 input, 64 hidden units.
  static FaceNetSpec Toy(int64_t num_classes);

  int64_t SpatialAfterTrunk() const;
  int64_t TrunkFeatures() const;
  // Throws kSpec on non-positive fields, fewer than 2 classes, or a trunk
  // that pools the input away.
  void Validate() const;

  std::string ToManifest() const;
  static FaceNetSpec FromManifest(const std::string& text);

  bool operator==(const FaceNetSpec&) const = default;
};

struct FacePrediction {
  int64_t label = 0;
  double confidence = 0.0;
  std::vector<double> probs;
};

class FaceNet {
 public:
  static FaceNet Build(const FaceNetSpec& spec, uint64_t seed);
  static FaceNet Skeleton(const FaceNetSpec& spec);

  const FaceNetSpec& spec() const { return spec_; }
  ParameterList& params() { return params_; }
  const ParameterList& params() const { return params_; }

  // [3, S, S] -> logits [num_classes]. `trace` receives each pooled stage
  // output, then the flattened features, hidden and logits shapes.
  Tensor Forward(const Tensor& input, ShapeTrace* trace = nullptr) const;

  // Stage-by-stage shapes without running the convolutions.
  ShapeTrace TraceShapes() const;

  // Grayscale is replicated to RGB. Throws kShape unless the image is
  // input_size x input_size.
  FacePrediction Classify(const Image& image) const;

  // Consecutive convolutions with equal shapes share a row.
  ParamReport CountParams() const;

  FaceNet Clone() const;

 private:
  FaceNet() = default;

  FaceNetSpec spec_;
  ParameterList params_;
};

}  // namespace biogate

#endif  // BIOGATE_FACE_NET_H_
