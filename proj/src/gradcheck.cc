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

#include "biogate/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace biogate {

GradCheckResult FiniteDiffCheck(
    const std::function<Tensor(const Tensor&)>& f, const Tensor& point,
    double h) {
  GradCheckResult result;
  std::vector<double> base(point.data().begin(), point.data().end());

  Tensor x = Tensor::FromVector(point.shape(), base, /*requires_grad=*/true);
  Backward(f(x));
  if (x.has_grad()) {
    result.analytic.assign(x.grad().begin(), x.grad().end());
  } else {
    result.analytic.assign(base.size(), 0.0);
  }

  auto eval_at = [&](size_t i, double value) {
    std::vector<double> shifted = base;
    shifted[i] = value;
    return f(Tensor::FromVector(point.shape(), std::move(shifted))).item();
  };

  result.numeric.resize(base.size());
  for (size_t i = 0; i < base.size(); ++i) {
    const double plus = eval_at(i, base[i] + h);
    const double minus = eval_at(i, base[i] - h);
    result.numeric[i] = (plus - minus) / (2.0 * h);
    const double a = result.analytic[i];
    const double n = result.numeric[i];
    const double err = std::abs(a - n) / std::max(1e-8, std::abs(a) + std::abs(n));
    result.max_relative_error = std::max(result.max_relative_error, err);
  }
  return result;
}

}  // namespace biogate
