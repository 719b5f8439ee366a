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

#ifndef BIOGATE_MODEL_H_
#define BIOGATE_MODEL_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "biogate/random.h"
#include "biogate/tensor.h"

namespace biogate {

struct NamedTensor {
  std::string name;
  Tensor value;
};

// Ordered parameter set. Order is part of the serialized format.
class ParameterList {
 public:
  Tensor& Add(std::string name, Shape shape);
  const Tensor& Get(const std::string& name) const;

  std::vector<NamedTensor>& entries() { return entries_; }
  const std::vector<NamedTensor>& entries() const { return entries_; }
  std::vector<Tensor> tensors() const;
  int64_t TotalElements() const;

  // Independent copy of every value.
  ParameterList Clone() const;
  void CopyValuesFrom(const ParameterList& other);
  bool ValuesEqual(const ParameterList& other) const;

 private:
  std::vector<NamedTensor> entries_;
};

// Fills weights uniformly in +-sqrt(6 / fan_in); biases start at zero.
void InitFanInUniform(Tensor& weights, int64_t fan_in, Rng& rng);

struct LayerCount {
  std::string layer;      // e.g. "Conv64", "Res64"
  std::string structure;  // e.g. "5x5, 64"
  std::string stride;
  int64_t params_each = 0;
  int repeat = 1;

  int64_t total() const { return params_each * repeat; }
};

struct ParamReport {
  std::vector<LayerCount> layers;
  int64_t total = 0;
};

}  // namespace biogate

#endif  // BIOGATE_MODEL_H_
