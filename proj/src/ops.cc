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

#include "biogate/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "biogate/error.h"

namespace biogate::ops {

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;

struct ConvGeometry {
  int64_t channels, height, width;
  int64_t kernel_h, kernel_w;
  int64_t stride_h, stride_w;
  int64_t pad_top, pad_left;
  int64_t out_h, out_w;
};

int64_t SamePadBefore(int64_t in, int64_t kernel, int64_t stride, int64_t out) {
  int64_t total = std::max<int64_t>((out - 1) * stride + kernel - in, 0);
  return total / 2;
}

// Unrolls receptive fields into a [C*kh*kw, out_h*out_w] row-major matrix.
void Im2Col(const double* input, const ConvGeometry& g, double* cols) {
  const int64_t plane = g.out_h * g.out_w;
  for (int64_t c = 0; c < g.channels; ++c) {
    const double* channel = input + c * g.height * g.width;
    for (int64_t ki = 0; ki < g.kernel_h; ++ki) {
      for (int64_t kj = 0; kj < g.kernel_w; ++kj) {
        double* row = cols + ((c * g.kernel_h + ki) * g.kernel_w + kj) * plane;
        for (int64_t oy = 0; oy < g.out_h; ++oy) {
          const int64_t iy = oy * g.stride_h - g.pad_top + ki;
          double* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= g.height) {
            std::fill(dst, dst + g.out_w, 0.0);
            continue;
          }
          const double* src = channel + iy * g.width;
          for (int64_t ox = 0; ox < g.out_w; ++ox) {
            const int64_t ix = ox * g.stride_w - g.pad_left + kj;
            dst[ox] = (ix >= 0 && ix < g.width) ? src[ix] : 0.0;
          }
        }
      }
    }
  }
}

void Col2ImAccumulate(const double* cols, const ConvGeometry& g,
                      double* input_grad) {
  const int64_t plane = g.out_h * g.out_w;
  for (int64_t c = 0; c < g.channels; ++c) {
    double* channel = input_grad + c * g.height * g.width;
    for (int64_t ki = 0; ki < g.kernel_h; ++ki) {
      for (int64_t kj = 0; kj < g.kernel_w; ++kj) {
        const double* row =
            cols + ((c * g.kernel_h + ki) * g.kernel_w + kj) * plane;
        for (int64_t oy = 0; oy < g.out_h; ++oy) {
          const int64_t iy = oy * g.stride_h - g.pad_top + ki;
          if (iy < 0 || iy >= g.height) continue;
          const double* src = row + oy * g.out_w;
          double* dst = channel + iy * g.width;
          for (int64_t ox = 0; ox < g.out_w; ++ox) {
            const int64_t ix = ox * g.stride_w - g.pad_left + kj;
            if (ix >= 0 && ix < g.width) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

void RequireRank(const Tensor& t, size_t rank, const char* what) {
  Require(t.defined() && t.rank() == rank, ErrorCode::kShape,
          std::string(what) + " must have rank " + std::to_string(rank) +
              (t.defined() ? ", got " + ShapeToString(t.shape()) : ""));
}

}  // namespace

int64_t ConvOutputExtent(int64_t in, int64_t kernel, int64_t stride,
                         Padding padding) {
  Require(stride >= 1, ErrorCode::kShape, "stride must be >= 1");
  if (padding == Padding::kSame) return (in + stride - 1) / stride;
  Require(kernel <= in, ErrorCode::kShape,
          "kernel " + std::to_string(kernel) + " exceeds input extent " +
              std::to_string(in));
  return (in - kernel) / stride + 1;
}

Tensor Conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias,
              Stride stride, Padding padding) {
  RequireRank(input, 3, "conv2d input");
  RequireRank(weights, 4, "conv2d weights");
  RequireRank(bias, 1, "conv2d bias");
  const int64_t c_out = weights.dim(0);
  Require(weights.dim(1) == input.dim(0), ErrorCode::kShape,
          "conv2d channel mismatch: input " + ShapeToString(input.shape()) +
              ", weights " + ShapeToString(weights.shape()));
  Require(bias.dim(0) == c_out, ErrorCode::kShape,
          "conv2d bias length does not match output channels");

  ConvGeometry g{};
  g.channels = input.dim(0);
  g.height = input.dim(1);
  g.width = input.dim(2);
  g.kernel_h = weights.dim(2);
  g.kernel_w = weights.dim(3);
  g.stride_h = stride.h;
  g.stride_w = stride.w;
  g.out_h = ConvOutputExtent(g.height, g.kernel_h, g.stride_h, padding);
  g.out_w = ConvOutputExtent(g.width, g.kernel_w, g.stride_w, padding);
  if (padding == Padding::kSame) {
    g.pad_top = SamePadBefore(g.height, g.kernel_h, g.stride_h, g.out_h);
    g.pad_left = SamePadBefore(g.width, g.kernel_w, g.stride_w, g.out_w);
  }

  const int64_t k = g.channels * g.kernel_h * g.kernel_w;
  const int64_t p = g.out_h * g.out_w;
  // A pointwise stride-1 convolution reads the input as its own column matrix.
  const bool pointwise = g.kernel_h == 1 && g.kernel_w == 1 &&
                         g.stride_h == 1 && g.stride_w == 1;
  auto cols = std::make_shared<std::vector<double>>();
  if (!pointwise) {
    cols->resize(static_cast<size_t>(k * p));
    Im2Col(input.data().data(), g, cols->data());
  }
  const double* col_ptr = pointwise ? input.data().data() : cols->data();

  std::vector<double> out(static_cast<size_t>(c_out * p));
  {
    ConstMatrixMap w(weights.data().data(), c_out, k);
    ConstMatrixMap c(col_ptr, k, p);
    MatrixMap o(out.data(), c_out, p);
    o.noalias() = w * c;
    o.colwise() += ConstVectorMap(bias.data().data(), c_out);
  }

  return Tensor::MakeResult(
      {c_out, g.out_h, g.out_w}, std::move(out), {input, weights, bias},
      [input, weights, bias, cols, g, k, p, c_out,
       pointwise](std::span<const double> out_grad) mutable {
        ConstMatrixMap grad_out(out_grad.data(), c_out, p);
        const double* col_ptr = pointwise ? input.data().data() : cols->data();
        if (weights.requires_grad()) {
          MatrixMap dw(weights.grad_buffer().data(), c_out, k);
          dw.noalias() += grad_out * ConstMatrixMap(col_ptr, k, p).transpose();
        }
        if (bias.requires_grad()) {
          auto db = bias.grad_buffer();
          for (int64_t c = 0; c < c_out; ++c) {
            const double* row = out_grad.data() + c * p;
            double sum = 0.0;
            for (int64_t i = 0; i < p; ++i) sum += row[i];
            db[c] += sum;
          }
        }
        if (input.requires_grad()) {
          ConstMatrixMap w(weights.data().data(), c_out, k);
          if (pointwise) {
            MatrixMap(input.grad_buffer().data(), k, p).noalias() +=
                w.transpose() * grad_out;
          } else {
            RowMatrix dcols = w.transpose() * grad_out;
            Col2ImAccumulate(dcols.data(), g, input.grad_buffer().data());
          }
        }
      });
}

Tensor Dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  RequireRank(input, 1, "dense input");
  RequireRank(weights, 2, "dense weights");
  RequireRank(bias, 1, "dense bias");
  const int64_t n = weights.dim(0);
  const int64_t m = weights.dim(1);
  Require(input.dim(0) == n && bias.dim(0) == m, ErrorCode::kShape,
          "dense dimension mismatch: input " + ShapeToString(input.shape()) +
              ", weights " + ShapeToString(weights.shape()) + ", bias " +
              ShapeToString(bias.shape()));

  // Plain loops: Eigen's vectorized matrix-vector kernels choose their
  // summation order from buffer alignment, which breaks run-to-run
  // reproducibility.
  std::vector<double> out(bias.data().begin(), bias.data().end());
  {
    const double* w = weights.data().data();
    const double* x = input.data().data();
    for (int64_t i = 0; i < n; ++i) {
      const double xi = x[i];
      const double* row = w + i * m;
      for (int64_t j = 0; j < m; ++j) out[j] += xi * row[j];
    }
  }
  return Tensor::MakeResult(
      {m}, std::move(out), {input, weights, bias},
      [input, weights, bias, n, m](std::span<const double> g) {
        const double* x = input.data().data();
        const double* w = weights.data().data();
        if (weights.requires_grad()) {
          auto dw = weights.grad_buffer();
          for (int64_t i = 0; i < n; ++i) {
            double* row = dw.data() + i * m;
            for (int64_t j = 0; j < m; ++j) row[j] += x[i] * g[j];
          }
        }
        if (bias.requires_grad()) {
          auto db = bias.grad_buffer();
          for (int64_t j = 0; j < m; ++j) db[j] += g[j];
        }
        if (input.requires_grad()) {
          auto dx = input.grad_buffer();
          for (int64_t i = 0; i < n; ++i) {
            const double* row = w + i * m;
            double sum = 0.0;
            for (int64_t j = 0; j < m; ++j) sum += row[j] * g[j];
            dx[i] += sum;
          }
        }
      });
}

Tensor Relu(const Tensor& x) {
  auto in = x.data();
  std::vector<double> out(in.size());
  for (size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
  return Tensor::MakeResult(x.shape(), std::move(out), {x},
                            [x](std::span<const double> g) mutable {
                              auto in = x.data();
                              auto dx = x.grad_buffer();
                              for (size_t i = 0; i < g.size(); ++i) {
                                if (in[i] > 0.0) dx[i] += g[i];
                              }
                            });
}

Tensor MaxPool2d(const Tensor& input, int64_t window) {
  RequireRank(input, 3, "maxpool input");
  Require(window >= 1, ErrorCode::kShape, "maxpool window must be >= 1");
  const int64_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  Require(window <= h && window <= w, ErrorCode::kShape,
          "maxpool window " + std::to_string(window) + " larger than input " +
              ShapeToString(input.shape()));
  const int64_t oh = h / window, ow = w / window;
  auto in = input.data();
  std::vector<double> out(static_cast<size_t>(c * oh * ow));
  auto argmax = std::make_shared<std::vector<int64_t>>(out.size());
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t oy = 0; oy < oh; ++oy) {
      for (int64_t ox = 0; ox < ow; ++ox) {
        int64_t best = (ch * h + oy * window) * w + ox * window;
        for (int64_t dy = 0; dy < window; ++dy) {
          for (int64_t dx = 0; dx < window; ++dx) {
            int64_t idx = (ch * h + oy * window + dy) * w + ox * window + dx;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const int64_t o = (ch * oh + oy) * ow + ox;
        out[o] = in[best];
        (*argmax)[o] = best;
      }
    }
  }
  return Tensor::MakeResult({c, oh, ow}, std::move(out), {input},
                            [input, argmax](std::span<const double> g) mutable {
                              auto dx = input.grad_buffer();
                              for (size_t i = 0; i < g.size(); ++i) {
                                dx[(*argmax)[i]] += g[i];
                              }
                            });
}

Tensor MeanOverTime(const Tensor& input) {
  RequireRank(input, 3, "mean_over_time input");
  const int64_t c = input.dim(0), f = input.dim(1), t = input.dim(2);
  auto in = input.data();
  std::vector<double> out(static_cast<size_t>(c * f));
  for (int64_t row = 0; row < c * f; ++row) {
    double acc = 0.0;
    for (int64_t i = 0; i < t; ++i) acc += in[row * t + i];
    out[row] = acc / static_cast<double>(t);
  }
  return Tensor::MakeResult({c, f}, std::move(out), {input},
                            [input, t](std::span<const double> g) mutable {
                              auto dx = input.grad_buffer();
                              const double inv = 1.0 / static_cast<double>(t);
                              for (size_t row = 0; row < g.size(); ++row) {
                                for (int64_t i = 0; i < t; ++i) {
                                  dx[row * t + i] += g[row] * inv;
                                }
                              }
                            });
}

Tensor L2Normalize(const Tensor& x) {
  auto in = x.data();
  double sq = 0.0;
  for (double v : in) sq += v * v;
  const double norm = std::sqrt(sq);
  Require(norm > 0.0 && std::isfinite(norm), ErrorCode::kDegenerateVector,
          "cannot L2-normalize a zero or non-finite vector");
  std::vector<double> out(in.size());
  for (size_t i = 0; i < in.size(); ++i) out[i] = in[i] / norm;
  auto y = std::make_shared<std::vector<double>>(out);
  return Tensor::MakeResult(
      x.shape(), std::move(out), {x},
      [x, y, norm](std::span<const double> g) mutable {
        // d(x/|x|) = (g - y (y . g)) / |x|
        double yg = 0.0;
        for (size_t i = 0; i < g.size(); ++i) yg += (*y)[i] * g[i];
        auto dx = x.grad_buffer();
        for (size_t i = 0; i < g.size(); ++i) {
          dx[i] += (g[i] - (*y)[i] * yg) / norm;
        }
      });
}

Tensor TripletLoss(const Tensor& anchor, const Tensor& positive,
                   const Tensor& negative, double alpha) {
  RequireRank(anchor, 1, "triplet anchor");
  Require(positive.shape() == anchor.shape() && negative.shape() == anchor.shape(),
          ErrorCode::kShape, "triplet embeddings differ in shape");
  Require(alpha > 0.0, ErrorCode::kContract, "triplet margin must be positive");
  auto norm = [](std::span<const double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double n = std::sqrt(sq);
    Require(n > 0.0 && std::isfinite(n), ErrorCode::kDegenerateVector,
            "triplet loss of a zero or non-finite embedding");
    return n;
  };
  auto dot = [](std::span<const double> u, std::span<const double> v) {
    double d = 0.0;
    for (size_t i = 0; i < u.size(); ++i) d += u[i] * v[i];
    return d;
  };
  auto a = anchor.data(), p = positive.data(), n = negative.data();
  const double na = norm(a), np = norm(p), nn = norm(n);
  const double cos_ap = dot(a, p) / (na * np);
  const double cos_an = dot(a, n) / (na * nn);
  const double margin = cos_an - cos_ap + alpha;
  const double loss = std::max(0.0, margin);
  return Tensor::MakeResult(
      {}, {loss}, {anchor, positive, negative},
      [anchor, positive, negative, na, np, nn, cos_ap, cos_an,
       active = margin > 0.0](std::span<const double> g) {
        if (!active) return;
        const double s = g[0];
        auto a = anchor.data(), p = positive.data(), n = negative.data();
        auto da = anchor.grad_buffer();
        auto dp = positive.grad_buffer();
        auto dn = negative.grad_buffer();
        // d cos(u, v) / du = v / (|u||v|) - cos(u, v) u / |u|^2
        for (size_t i = 0; i < a.size(); ++i) {
          const double dcan_da = n[i] / (na * nn) - cos_an * a[i] / (na * na);
          const double dcap_da = p[i] / (na * np) - cos_ap * a[i] / (na * na);
          da[i] += s * (dcan_da - dcap_da);
          dn[i] += s * (a[i] / (na * nn) - cos_an * n[i] / (nn * nn));
          dp[i] -= s * (a[i] / (na * np) - cos_ap * p[i] / (np * np));
        }
      });
}

std::vector<double> Softmax(std::span<const double> logits) {
  Require(!logits.empty(), ErrorCode::kShape, "softmax of an empty vector");
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

Tensor SoftmaxXent(const Tensor& logits, int64_t label) {
  RequireRank(logits, 1, "softmax_xent logits");
  const int64_t k = logits.dim(0);
  Require(label >= 0 && label < k, ErrorCode::kContract,
          "label " + std::to_string(label) + " outside [0, " +
              std::to_string(k) + ")");
  auto z = logits.data();
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - peak);
  const double log_sum = peak + std::log(total);
  const double loss = log_sum - z[label];
  return Tensor::MakeResult(
      {1}, {loss}, {logits},
      [logits, label, log_sum](std::span<const double> g) mutable {
        auto z = logits.data();
        auto dz = logits.grad_buffer();
        for (size_t i = 0; i < z.size(); ++i) {
          double p = std::exp(z[i] - log_sum);
          dz[i] += g[0] * (p - (static_cast<int64_t>(i) == label ? 1.0 : 0.0));
        }
      });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  Require(a.shape() == b.shape(), ErrorCode::kShape,
          "add shape mismatch: " + ShapeToString(a.shape()) + " vs " +
              ShapeToString(b.shape()));
  auto x = a.data(), y = b.data();
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return Tensor::MakeResult(a.shape(), std::move(out), {a, b},
                            [a, b](std::span<const double> g) mutable {
                              for (const Tensor* t : {&a, &b}) {
                                if (!t->requires_grad()) continue;
                                auto d = t->grad_buffer();
                                for (size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                              }
                            });
}

Tensor Scale(const Tensor& x, double factor) {
  auto in = x.data();
  std::vector<double> out(in.size());
  for (size_t i = 0; i < in.size(); ++i) out[i] = in[i] * factor;
  return Tensor::MakeResult(x.shape(), std::move(out), {x},
                            [x, factor](std::span<const double> g) mutable {
                              auto d = x.grad_buffer();
                              for (size_t i = 0; i < g.size(); ++i) {
                                d[i] += g[i] * factor;
                              }
                            });
}

Tensor Sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return Tensor::MakeResult({1}, {total}, {x},
                            [x](std::span<const double> g) mutable {
                              for (double& d : x.grad_buffer()) d += g[0];
                            });
}

Tensor Dot(const Tensor& a, const Tensor& b) {
  Require(a.numel() == b.numel(), ErrorCode::kShape, "dot length mismatch");
  auto x = a.data(), y = b.data();
  double total = 0.0;
  for (size_t i = 0; i < x.size(); ++i) total += x[i] * y[i];
  return Tensor::MakeResult({1}, {total}, {a, b},
                            [a, b](std::span<const double> g) mutable {
                              if (a.requires_grad()) {
                                auto d = a.grad_buffer();
                                auto y = b.data();
                                for (size_t i = 0; i < d.size(); ++i) d[i] += g[0] * y[i];
                              }
                              if (b.requires_grad()) {
                                auto d = b.grad_buffer();
                                auto x = a.data();
                                for (size_t i = 0; i < d.size(); ++i) d[i] += g[0] * x[i];
                              }
                            });
}

Tensor Reshape(const Tensor& x, Shape shape) {
  Require(NumElements(shape) == x.numel(), ErrorCode::kShape,
          "cannot reshape " + ShapeToString(x.shape()) + " to " +
              ShapeToString(shape));
  std::vector<double> out(x.data().begin(), x.data().end());
  return Tensor::MakeResult(std::move(shape), std::move(out), {x},
                            [x](std::span<const double> g) mutable {
                              auto d = x.grad_buffer();
                              for (size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                            });
}

Tensor MeanOf(const std::vector<Tensor>& scalars) {
  Require(!scalars.empty(), ErrorCode::kContract, "mean of no tensors");
  double total = 0.0;
  for (const Tensor& s : scalars) {
    Require(s.numel() == 1, ErrorCode::kShape, "MeanOf expects scalars");
    total += s.item();
  }
  const double inv = 1.0 / static_cast<double>(scalars.size());
  return Tensor::MakeResult({1}, {total * inv}, scalars,
                            [scalars, inv](std::span<const double> g) mutable {
                              for (const Tensor& s : scalars) {
                                if (s.requires_grad()) s.grad_buffer()[0] += g[0] * inv;
                              }
                            });
}

}  // namespace biogate::ops
