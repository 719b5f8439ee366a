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

#include "biogate/model.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "biogate/error.h"

namespace biogate {

Tensor& ParameterList::Add(std::string name, Shape shape) {
  entries_.push_back({std::move(name), Tensor::Zeros(std::move(shape), true)});
  return entries_.back().value;
}

const Tensor& ParameterList::Get(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.value;
  }
  Fail(ErrorCode::kNotFound, "no parameter named " + name);
}

std::vector<Tensor> ParameterList::tensors() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.value);
  return out;
}

int64_t ParameterList::TotalElements() const {
  int64_t n = 0;
  for (const auto& e : entries_) n += e.value.numel();
  return n;
}

ParameterList ParameterList::Clone() const {
  ParameterList copy;
  for (const auto& e : entries_) {
    Tensor t = e.value.Detach();
    t.set_requires_grad(e.value.requires_grad());
    copy.entries_.push_back({e.name, t});
  }
  return copy;
}

void ParameterList::CopyValuesFrom(const ParameterList& other) {
  Require(other.entries_.size() == entries_.size(), ErrorCode::kShape,
          "parameter lists differ in length");
  for (size_t i = 0; i < entries_.size(); ++i) {
    auto src = other.entries_[i].value.data();
    auto dst = entries_[i].value.mutable_data();
    Require(src.size() == dst.size(), ErrorCode::kShape,
            "parameter " + entries_[i].name + " differs in size");
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

// Bitwise, so -0.0 and 0.0 differ.
bool ParameterList::ValuesEqual(const ParameterList& other) const {
  if (other.entries_.size() != entries_.size()) return false;
  for (size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.value.shape() != b.value.shape()) return false;
    auto x = a.value.data();
    auto y = b.value.data();
    if (std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

void InitFanInUniform(Tensor& weights, int64_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (double& w : weights.mutable_data()) w = rng.Uniform(-bound, bound);
}

}  // namespace biogate
