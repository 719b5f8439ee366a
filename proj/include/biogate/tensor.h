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

#ifndef BIOGATE_TENSOR_H_
#define BIOGATE_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace biogate {

using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Dense row-major array of doubles that can take part in reverse-mode
// differentiation. A Tensor is a cheap handle: copies share storage, use
// Clone() or Detach() for an independent buffer.
//
// Results of primitive ops record their parents and a backward closure when
// any parent requires a gradient. Backward() walks that graph once and
// accumulates into every reachable tensor that requires a gradient.
class Tensor {
 public:
  // Receives the gradient of the loss with respect to the op's output and
  // accumulates into the parents' gradient buffers.
  using BackwardFn = std::function<void(std::span<const double> out_grad)>;

  Tensor() = default;

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Filled(Shape shape, double value, bool requires_grad = false);
  static Tensor FromVector(Shape shape, std::vector<double> values,
                           bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);

  // Creates the output of a primitive. `backward` is dropped when none of
  // the parents requires a gradient.
  static Tensor MakeResult(Shape shape, std::vector<double> values,
                           std::vector<Tensor> parents, BackwardFn backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  size_t rank() const { return shape().size(); }
  int64_t dim(size_t axis) const { return shape().at(axis); }
  int64_t numel() const;

  std::span<const double> data() const;
  std::span<double> mutable_data();
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool value);

  bool has_grad() const;
  std::span<const double> grad() const;
  // Gradient buffer, allocated as zeros on first access.
  std::span<double> grad_buffer() const;
  void ZeroGrad();

  // Same values, no graph history, independent storage.
  Tensor Detach() const;
  Tensor Clone() const { return Detach(); }

  bool SameStorage(const Tensor& other) const { return node_ == other.node_; }

 private:
  struct Node;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  std::shared_ptr<Node> node_;

  friend void Backward(const Tensor& output);
};

// While alive on a thread, ops on that thread record no graph. Used for
// inference so activations are released as soon as they are consumed.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

  static bool active();

 private:
  bool previous_;
};

// Reverse-mode accumulation from a scalar output. Throws kContract when the
// output holds more than one element.
void Backward(const Tensor& output);

}  // namespace biogate

#endif  // BIOGATE_TENSOR_H_
