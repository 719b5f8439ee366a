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

#ifndef BIOGATE_OPTIM_H_
#define BIOGATE_OPTIM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "biogate/tensor.h"

namespace biogate {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  int64_t t = 0;
  AdamHyper hyper;

  explicit AdamState(size_t size = 0, AdamHyper h = {})
      : m(size, 0.0), v(size, 0.0), hyper(h) {}
};

// One bias-corrected Adam update of `param` in place. Throws kNumeric, and
// leaves both param and state untouched, if any gradient is not finite.
void AdamStep(Tensor& param, std::span<const double> grad, AdamState& state);

// Adam over a fixed parameter list, reading each parameter's accumulated
// gradient (a parameter without one is treated as having zero gradient).
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamHyper hyper);

  void Step();
  void ZeroGrad();

  int64_t steps() const { return states_.empty() ? 0 : states_.front().t; }
  const std::vector<AdamState>& states() const { return states_; }

 private:
  std::vector<Tensor> params_;
  std::vector<AdamState> states_;
};

}  // namespace biogate

#endif  // BIOGATE_OPTIM_H_
