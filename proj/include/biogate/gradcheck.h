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

#ifndef BIOGATE_GRADCHECK_H_
#define BIOGATE_GRADCHECK_H_

#include <functional>
#include <vector>

#include "biogate/tensor.h"

namespace biogate {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

// Compares backward() against central differences (f(x+h) - f(x-h)) / 2h at
// every coordinate of `point`. The per-coordinate error is
// |a - n| / max(1e-8, |a| + |n|).
GradCheckResult FiniteDiffCheck(
    const std::function<Tensor(const Tensor&)>& f, const Tensor& point,
    double h = 1e-5);

}  // namespace biogate

#endif  // BIOGATE_GRADCHECK_H_
