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

#ifndef BIOGATE_OPS_H_
#define BIOGATE_OPS_H_

#include <cstdint>
#include <vector>

#include "biogate/tensor.h"

namespace biogate::ops {

enum class Padding { kSame, kValid };

struct Stride {
  int64_t h = 1;
  int64_t w = 1;
};

// Output extent of a convolution along one axis.
int64_t ConvOutputExtent(int64_t in, int64_t kernel, int64_t stride,
                         Padding padding);

// Cross-correlation. input [C_in, H, W], weights [C_out, C_in, kh, kw],
// bias [C_out]. Same padding is split TensorFlow-style (extra row/column at
// the bottom/right) and gives ceil(H / s_h) x ceil(W / s_w).
Tensor Conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias,
              Stride stride, Padding padding);

// input [n] . weights [n, m] + bias [m] -> [m]
Tensor Dense(const Tensor& input, const Tensor& weights, const Tensor& bias);

Tensor Relu(const Tensor& x);

// Non-overlapping window x window max over [C, H, W]; trailing rows and
// columns that do not fill a window are dropped.
Tensor MaxPool2d(const Tensor& input, int64_t window);

// [C, F, T] -> [C, F]
Tensor MeanOverTime(const Tensor& input);

// x / ||x||_2 over all elements. Throws kDegenerateVector on a zero input.
Tensor L2Normalize(const Tensor& x);

// -log softmax(logits)[label] for a rank-1 logits vector.
Tensor SoftmaxXent(const Tensor& logits, int64_t label);

std::vector<double> Softmax(std::span<const double> logits);

// max(0, cos(a, n) - cos(a, p) + alpha) with true cosines, so the inputs need
// not be normalized.
Tensor TripletLoss(const Tensor& anchor, const Tensor& positive,
                   const Tensor& negative, double alpha);

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& x, double factor);
Tensor Sum(const Tensor& x);
Tensor Dot(const Tensor& a, const Tensor& b);
Tensor Reshape(const Tensor& x, Shape shape);
// Arithmetic mean of scalar tensors.
Tensor MeanOf(const std::vector<Tensor>& scalars);

}  // namespace biogate::ops

#endif  // BIOGATE_OPS_H_
