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

#include "biogate/optim.h"

#include <cmath>

#include "biogate/error.h"

namespace biogate {

namespace {

void CheckFinite(std::span<const double> grad) {
  for (double g : grad) {
    Require(std::isfinite(g), ErrorCode::kNumeric,
            "non-finite gradient encountered");
  }
}

void ApplyUpdate(Tensor& param, std::span<const double> grad,
                 AdamState& state) {
  const AdamHyper& h = state.hyper;
  state.t += 1;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));
  auto w = param.mutable_data();
  for (size_t i = 0; i < w.size(); ++i) {
    const double g = grad.empty() ? 0.0 : grad[i];
    state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * g;
    state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    w[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
  }
}

}  // namespace

void AdamStep(Tensor& param, std::span<const double> grad, AdamState& state) {
  Require(static_cast<int64_t>(grad.size()) == param.numel() &&
              state.m.size() == grad.size() && state.v.size() == grad.size(),
          ErrorCode::kShape, "adam: parameter, gradient and state disagree");
  CheckFinite(grad);
  ApplyUpdate(param, grad, state);
}

Adam::Adam(std::vector<Tensor> params, AdamHyper hyper)
    : params_(std::move(params)) {
  states_.reserve(params_.size());
  for (const Tensor& p : params_) {
    states_.emplace_back(static_cast<size_t>(p.numel()), hyper);
  }
}

void Adam::Step() {
  // Validate everything first so a bad gradient leaves the model untouched.
  for (const Tensor& p : params_) {
    if (p.has_grad()) CheckFinite(p.grad());
  }
  for (size_t i = 0; i < params_.size(); ++i) {
    std::span<const double> g;
    if (params_[i].has_grad()) g = params_[i].grad();
    ApplyUpdate(params_[i], g, states_[i]);
  }
}

void Adam::ZeroGrad() {
  for (Tensor& p : params_) p.ZeroGrad();
}

}  // namespace biogate
