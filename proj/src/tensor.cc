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

#include "biogate/tensor.h"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "biogate/error.h"

namespace biogate {

struct Tensor::Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<Tensor> parents;
  BackwardFn backward;
};

namespace {
thread_local bool g_no_grad = false;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_no_grad) { g_no_grad = true; }
NoGradGuard::~NoGradGuard() { g_no_grad = previous_; }
bool NoGradGuard::active() { return g_no_grad; }

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  return Filled(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::Filled(Shape shape, double value, bool requires_grad) {
  for (int64_t d : shape) {
    Require(d > 0, ErrorCode::kShape,
            "tensor extents must be positive, got " + ShapeToString(shape));
  }
  auto node = std::make_shared<Node>();
  node->data.assign(static_cast<size_t>(NumElements(shape)), value);
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::FromVector(Shape shape, std::vector<double> values,
                          bool requires_grad) {
  for (int64_t d : shape) {
    Require(d > 0, ErrorCode::kShape,
            "tensor extents must be positive, got " + ShapeToString(shape));
  }
  Require(NumElements(shape) == static_cast<int64_t>(values.size()),
          ErrorCode::kShape,
          "value count " + std::to_string(values.size()) +
              " does not match shape " + ShapeToString(shape));
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return FromVector({1}, {value}, requires_grad);
}

Tensor Tensor::MakeResult(Shape shape, std::vector<double> values,
                          std::vector<Tensor> parents, BackwardFn backward) {
  Tensor out = FromVector(std::move(shape), std::move(values));
  bool needs_grad = !g_no_grad && std::any_of(parents.begin(), parents.end(),
                                [](const Tensor& p) { return p.requires_grad(); });
  if (needs_grad) {
    out.node_->requires_grad = true;
    out.node_->parents = std::move(parents);
    out.node_->backward = std::move(backward);
  }
  return out;
}

const Shape& Tensor::shape() const {
  Require(defined(), ErrorCode::kContract, "use of an undefined tensor");
  return node_->shape;
}

int64_t Tensor::numel() const { return static_cast<int64_t>(data().size()); }

std::span<const double> Tensor::data() const {
  Require(defined(), ErrorCode::kContract, "use of an undefined tensor");
  return node_->data;
}

std::span<double> Tensor::mutable_data() {
  Require(defined(), ErrorCode::kContract, "use of an undefined tensor");
  return node_->data;
}

double Tensor::item() const {
  Require(numel() == 1, ErrorCode::kContract,
          "item() on a tensor of shape " + ShapeToString(shape()));
  return node_->data[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

void Tensor::set_requires_grad(bool value) {
  Require(defined(), ErrorCode::kContract, "use of an undefined tensor");
  node_->requires_grad = value;
}

bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }

std::span<const double> Tensor::grad() const {
  Require(has_grad(), ErrorCode::kContract, "tensor has no gradient");
  return node_->grad;
}

std::span<double> Tensor::grad_buffer() const {
  Require(defined(), ErrorCode::kContract, "use of an undefined tensor");
  if (node_->grad.empty()) node_->grad.assign(node_->data.size(), 0.0);
  return node_->grad;
}

void Tensor::ZeroGrad() {
  if (node_) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::Detach() const {
  return FromVector(shape(), node_->data);
}

void Backward(const Tensor& output) {
  Require(output.defined() && output.numel() == 1, ErrorCode::kContract,
          "backward() needs a scalar output");
  if (!output.requires_grad()) return;

  // Iterative post-order DFS; reversed it is a topological order from the
  // output towards the leaves.
  std::vector<Tensor::Node*> order;
  std::unordered_set<Tensor::Node*> visited;
  std::vector<std::pair<Tensor::Node*, size_t>> stack;
  stack.emplace_back(output.node_.get(), 0);
  visited.insert(output.node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Tensor::Node* parent = node->parents[next++].node_.get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior gradients are per-call; only leaves accumulate across calls.
  for (Tensor::Node* node : order) {
    if (node->backward) node->grad.assign(node->data.size(), 0.0);
  }
  Tensor::Node* root = output.node_.get();
  if (root->grad.empty()) root->grad.assign(1, 0.0);
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Tensor::Node* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(node->grad);
  }
}

}  // namespace biogate
