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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "biogate/error.h"
#include "biogate/gradcheck.h"
#include "biogate/ops.h"
#include "biogate/optim.h"
#include "test_util.h"

namespace biogate {
namespace {

using ops::Padding;
using testing::RandomTensor;

template <typename Fn>
ErrorCode CodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kUsage;
}

TEST(Conv2dTest, PointwiseKernelScales) {
  Tensor x = Tensor::Filled({1, 4, 4}, 1.0);
  Tensor w = Tensor::Filled({1, 1, 1, 1}, 2.0);
  Tensor b = Tensor::Zeros({1});
  Tensor y = ops::Conv2d(x, w, b, {1, 1}, Padding::kSame);
  EXPECT_EQ(y.shape(), (Shape{1, 4, 4}));
  for (double v : y.data()) EXPECT_DOUBLE_EQ(v, 2.0);
}

TEST(Conv2dTest, ValidTwoByTwoSums) {
  Tensor x = Tensor::FromVector({1, 2, 2}, {1, 2, 3, 4});
  Tensor w = Tensor::Filled({1, 1, 2, 2}, 1.0);
  Tensor y = ops::Conv2d(x, w, Tensor::Zeros({1}), {1, 1}, Padding::kValid);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 1}));
  EXPECT_DOUBLE_EQ(y.item(), 10.0);
}

TEST(Conv2dTest, StrideTwoSameHalvesExtents) {
  Rng rng(1);
  Tensor x = RandomTensor({1, 64, 80}, rng);
  Tensor w = RandomTensor({3, 1, 5, 5}, rng);
  Tensor y = ops::Conv2d(x, w, Tensor::Zeros({3}), {2, 2}, Padding::kSame);
  EXPECT_EQ(y.shape(), (Shape{3, 32, 40}));
}

TEST(Conv2dTest, SameStrideTwoExtentIsCeilHalfForAllSizes) {
  for (int64_t n = 1; n <= 65; ++n) {
    Tensor x = Tensor::Filled({1, n, n}, 1.0);
    Tensor w = Tensor::Filled({1, 1, 5, 5}, 1.0);
    Tensor y = ops::Conv2d(x, w, Tensor::Zeros({1}), {2, 2}, Padding::kSame);
    EXPECT_EQ(y.dim(1), (n + 1) / 2) << "n=" << n;
    EXPECT_EQ(y.dim(2), (n + 1) / 2) << "n=" << n;
    EXPECT_EQ(ops::ConvOutputExtent(n, 5, 2, Padding::kSame), (n + 1) / 2);
  }
}

TEST(Conv2dTest, MatchesDirectSummation) {
  // Reference: textbook nested-loop cross-correlation with zero padding.
  Rng rng(7);
  const int64_t cin = 2, cout = 3, h = 7, w = 6, k = 3, s = 2;
  Tensor x = RandomTensor({cin, h, w}, rng);
  Tensor wt = RandomTensor({cout, cin, k, k}, rng);
  Tensor b = RandomTensor({cout}, rng);
  Tensor y = ops::Conv2d(x, wt, b, {s, s}, Padding::kSame);
  const int64_t oh = (h + 1) / 2, ow = (w + 1) / 2;
  const int64_t pad_h = std::max<int64_t>((oh - 1) * s + k - h, 0) / 2;
  const int64_t pad_w = std::max<int64_t>((ow - 1) * s + k - w, 0) / 2;
  for (int64_t o = 0; o < cout; ++o) {
    for (int64_t i = 0; i < oh; ++i) {
      for (int64_t j = 0; j < ow; ++j) {
        double acc = b.data()[o];
        for (int64_t c = 0; c < cin; ++c) {
          for (int64_t u = 0; u < k; ++u) {
            for (int64_t v = 0; v < k; ++v) {
              int64_t yy = i * s - pad_h + u, xx = j * s - pad_w + v;
              if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
              acc += wt.data()[((o * cin + c) * k + u) * k + v] *
                     x.data()[(c * h + yy) * w + xx];
            }
          }
        }
        EXPECT_NEAR(y.data()[(o * oh + i) * ow + j], acc, 1e-12);
      }
    }
  }
}

TEST(Conv2dTest, ChannelMismatchIsShapeError) {
  Tensor x = Tensor::Zeros({2, 4, 4});
  Tensor w = Tensor::Zeros({1, 3, 3, 3});
  EXPECT_EQ(CodeOf([&] {
              ops::Conv2d(x, w, Tensor::Zeros({1}), {1, 1}, Padding::kSame);
            }),
            ErrorCode::kShape);
}

TEST(DenseTest, IdentityWeights) {
  Tensor x = Tensor::FromVector({3}, {0.5, -1.0, 2.0});
  Tensor w = Tensor::FromVector({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Tensor y = ops::Dense(x, w, Tensor::Zeros({3}));
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(y.data()[i], x.data()[i]);
}

TEST(DenseTest, HandProduct) {
  Tensor y = ops::Dense(Tensor::FromVector({2}, {1, 2}),
                        Tensor::FromVector({2, 2}, {1, 0, 0, 3}),
                        Tensor::FromVector({2}, {1, 1}));
  EXPECT_DOUBLE_EQ(y.data()[0], 2.0);
  EXPECT_DOUBLE_EQ(y.data()[1], 7.0);
}

TEST(DenseTest, AffineOutputLength) {
  Tensor y = ops::Dense(Tensor::Zeros({2048}), Tensor::Zeros({2048, 512}),
                        Tensor::Zeros({512}));
  EXPECT_EQ(y.shape(), (Shape{512}));
}

TEST(DenseTest, MismatchIsShapeError) {
  EXPECT_EQ(CodeOf([] {
              ops::Dense(Tensor::Zeros({3}), Tensor::Zeros({2, 2}), Tensor::Zeros({2}));
            }),
            ErrorCode::kShape);
}

TEST(PrimitiveTest, MeanOverTime) {
  Tensor same = Tensor::FromVector({1, 2, 2}, {4, 4, -1, -1});
  Tensor m = ops::MeanOverTime(same);
  EXPECT_EQ(m.shape(), (Shape{1, 2}));
  EXPECT_DOUBLE_EQ(m.data()[0], 4.0);
  EXPECT_DOUBLE_EQ(m.data()[1], -1.0);
  EXPECT_DOUBLE_EQ(ops::MeanOverTime(Tensor::FromVector({1, 1, 2}, {1, 3})).item(), 2.0);
}

TEST(PrimitiveTest, L2Normalize) {
  Tensor y = ops::L2Normalize(Tensor::FromVector({2}, {3, 4}));
  EXPECT_DOUBLE_EQ(y.data()[0], 0.6);
  EXPECT_DOUBLE_EQ(y.data()[1], 0.8);
  EXPECT_EQ(CodeOf([] { ops::L2Normalize(Tensor::Zeros({4})); }),
            ErrorCode::kDegenerateVector);
}

TEST(PrimitiveTest, L2NormalizeHasUnitNorm) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t n = 1 + static_cast<int64_t>(rng.Below(40));
    Tensor y = ops::L2Normalize(RandomTensor({n}, rng, -100, 100));
    double sq = 0;
    for (double v : y.data()) sq += v * v;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-9);
  }
}

TEST(PrimitiveTest, SoftmaxXentUniformIsLogK) {
  Tensor loss = ops::SoftmaxXent(Tensor::Filled({5}, 0.3), 2);
  EXPECT_NEAR(loss.item(), std::log(5.0), 1e-12);
  EXPECT_NEAR(loss.item(), 1.6094, 1e-4);
}

TEST(PrimitiveTest, SoftmaxSumsToOneAndXentNonNegative) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int64_t k = 2 + static_cast<int64_t>(rng.Below(10));
    Tensor logits = RandomTensor({k}, rng, -30, 30);
    auto p = ops::Softmax(logits.data());
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    EXPECT_GE(ops::SoftmaxXent(logits, static_cast<int64_t>(rng.Below(k))).item(), 0.0);
  }
}

TEST(PrimitiveTest, ReluClampsNegatives) {
  Tensor y = ops::Relu(Tensor::FromVector({3}, {-2.5, 0.0, 1.5}));
  EXPECT_EQ(y.data()[0], 0.0);
  EXPECT_EQ(y.data()[1], 0.0);
  EXPECT_EQ(y.data()[2], 1.5);
}

TEST(PrimitiveTest, MaxPool) {
  Tensor x = Tensor::FromVector({1, 2, 4}, {1, 5, 2, 0, 3, 4, 8, 7});
  Tensor y = ops::MaxPool2d(x, 2);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 2}));
  EXPECT_EQ(y.data()[0], 5.0);
  EXPECT_EQ(y.data()[1], 8.0);
  EXPECT_EQ(CodeOf([&] { ops::MaxPool2d(x, 3); }), ErrorCode::kShape);
}

TEST(BackwardTest, SumGivesOnes) {
  Tensor x = Tensor::FromVector({3}, {1, -2, 3}, true);
  Backward(ops::Sum(x));
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(BackwardTest, ReluSubgradient) {
  Tensor x = Tensor::FromVector({2}, {-1, 2}, true);
  Backward(ops::Sum(ops::Relu(x)));
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[1], 1.0);
}

TEST(BackwardTest, ReluGradientAtZeroIsZero) {
  Tensor x = Tensor::FromVector({1}, {0.0}, true);
  Backward(ops::Sum(ops::Relu(x)));
  EXPECT_EQ(x.grad()[0], 0.0);
}

TEST(BackwardTest, NonScalarIsContractError) {
  Tensor x = Tensor::FromVector({2}, {1, 2}, true);
  EXPECT_EQ(CodeOf([&] { Backward(ops::Relu(x)); }), ErrorCode::kContract);
}

TEST(BackwardTest, RepeatedCallsAccumulateIntoLeavesOnly) {
  Tensor x = Tensor::FromVector({2}, {1, 2}, true);
  Tensor y = ops::Sum(ops::Scale(x, 3.0));
  Backward(y);
  Backward(y);
  EXPECT_EQ(x.grad()[0], 6.0);
  EXPECT_EQ(x.grad()[1], 6.0);
}

TEST(BackwardTest, SharedSubexpressionAccumulates) {
  Tensor x = Tensor::FromVector({1}, {2.0}, true);
  Tensor y = ops::Add(x, x);  // 2x
  Backward(ops::Dot(y, y));   // 4x^2 -> 8x
  EXPECT_DOUBLE_EQ(x.grad()[0], 16.0);
}

TEST(BackwardTest, NoGradGuardRecordsNothing) {
  Tensor x = Tensor::FromVector({2}, {1, 2}, true);
  NoGradGuard guard;
  Tensor y = ops::Sum(x);
  EXPECT_FALSE(y.requires_grad());
}

TEST(GradCheckTest, SquareAtThree) {
  auto f = [](const Tensor& x) { return ops::Dot(x, x); };
  GradCheckResult r = FiniteDiffCheck(f, Tensor::Scalar(3.0), 1e-5);
  EXPECT_DOUBLE_EQ(r.analytic[0], 6.0);
  EXPECT_NEAR(r.numeric[0], 6.0, 1e-6);
  EXPECT_LT(r.max_relative_error, 1e-9);
}

TEST(GradCheckTest, LinearIsExactForAnyStep) {
  Tensor c = Tensor::FromVector({3}, {0.5, -2.0, 1.25});
  auto f = [&](const Tensor& x) { return ops::Dot(x, c); };
  for (double h : {1e-6, 1e-3, 0.5, 10.0}) {
    GradCheckResult r =
        FiniteDiffCheck(f, Tensor::FromVector({3}, {1, 2, 3}), h);
    EXPECT_LT(r.max_relative_error, 1e-9) << "h=" << h;
  }
}

// Finite-difference checks of every primitive over 20 seeds.
class PrimitiveGradientTest : public ::testing::TestWithParam<uint64_t> {};

TEST_P(PrimitiveGradientTest, Conv2dInputWeightsBias) {
  Rng rng(GetParam());
  Tensor x = RandomTensor({2, 5, 6}, rng);
  Tensor w = RandomTensor({3, 2, 3, 3}, rng);
  Tensor b = RandomTensor({3}, rng);
  Tensor probe = RandomTensor({3, 3, 3}, rng);
  auto through = [&](const Tensor& in, const Tensor& wt, const Tensor& bias) {
    return ops::Dot(ops::Conv2d(in, wt, bias, {2, 2}, Padding::kSame), probe);
  };
  EXPECT_LT(FiniteDiffCheck([&](const Tensor& v) { return through(v, w, b); }, x)
                .max_relative_error, 1e-4);
  EXPECT_LT(FiniteDiffCheck([&](const Tensor& v) { return through(x, v, b); }, w)
                .max_relative_error, 1e-4);
  EXPECT_LT(FiniteDiffCheck([&](const Tensor& v) { return through(x, w, v); }, b)
                .max_relative_error, 1e-4);
}

TEST_P(PrimitiveGradientTest, PointwiseConv) {
  Rng rng(GetParam());
  Tensor x = RandomTensor({3, 4, 5}, rng);
  Tensor w = RandomTensor({2, 3, 1, 1}, rng);
  Tensor probe = RandomTensor({2, 4, 5}, rng);
  auto f = [&](const Tensor& in) {
    return ops::Dot(ops::Conv2d(in, w, Tensor::Zeros({2}), {1, 1}, Padding::kSame),
                    probe);
  };
  EXPECT_LT(FiniteDiffCheck(f, x).max_relative_error, 1e-4);
}

TEST_P(PrimitiveGradientTest, Dense) {
  Rng rng(GetParam());
  Tensor x = RandomTensor({6}, rng);
  Tensor w = RandomTensor({6, 4}, rng);
  Tensor b = RandomTensor({4}, rng);
  Tensor probe = RandomTensor({4}, rng);
  auto through = [&](const Tensor& in, const Tensor& wt, const Tensor& bias) {
    return ops::Dot(ops::Dense(in, wt, bias), probe);
  };
  EXPECT_LT(FiniteDiffCheck([&](const Tensor& v) { return through(v, w, b); }, x)
                .max_relative_error, 1e-4);
  EXPECT_LT(FiniteDiffCheck([&](const Tensor& v) { return through(x, v, b); }, w)
                .max_relative_error, 1e-4);
  EXPECT_LT(FiniteDiffCheck([&](const Tensor& v) { return through(x, w, v); }, b)
                .max_relative_error, 1e-4);
}

TEST_P(PrimitiveGradientTest, MeanOverTime) {
  Rng rng(GetParam());
  Tensor probe = RandomTensor({2, 3}, rng);
  auto f = [&](const Tensor& in) { return ops::Dot(ops::MeanOverTime(in), probe); };
  EXPECT_LT(FiniteDiffCheck(f, RandomTensor({2, 3, 5}, rng)).max_relative_error, 1e-4);
}

TEST_P(PrimitiveGradientTest, L2Normalize) {
  Rng rng(GetParam());
  Tensor probe = RandomTensor({7}, rng);
  auto f = [&](const Tensor& in) { return ops::Dot(ops::L2Normalize(in), probe); };
  EXPECT_LT(FiniteDiffCheck(f, RandomTensor({7}, rng)).max_relative_error, 1e-4);
}

TEST_P(PrimitiveGradientTest, SoftmaxXent) {
  Rng rng(GetParam());
  const int64_t label = static_cast<int64_t>(rng.Below(5));
  auto f = [&](const Tensor& in) { return ops::SoftmaxXent(in, label); };
  EXPECT_LT(FiniteDiffCheck(f, RandomTensor({5}, rng, -3, 3)).max_relative_error, 1e-4);
}

TEST_P(PrimitiveGradientTest, ReluAwayFromKink) {
  Rng rng(GetParam());
  std::vector<double> v(8);
  for (double& x : v) {
    x = rng.Uniform(0.05, 1.0) * (rng.Uniform() < 0.5 ? -1.0 : 1.0);
  }
  Tensor probe = RandomTensor({8}, rng);
  auto f = [&](const Tensor& in) { return ops::Dot(ops::Relu(in), probe); };
  EXPECT_LT(FiniteDiffCheck(f, Tensor::FromVector({8}, v)).max_relative_error, 1e-4);
}

TEST_P(PrimitiveGradientTest, MaxPool) {
  Rng rng(GetParam());
  Tensor probe = RandomTensor({2, 2, 2}, rng);
  auto f = [&](const Tensor& in) { return ops::Dot(ops::MaxPool2d(in, 2), probe); };
  EXPECT_LT(FiniteDiffCheck(f, RandomTensor({2, 4, 5}, rng)).max_relative_error, 1e-4);
}

TEST_P(PrimitiveGradientTest, ConvReluDenseComposite) {
  Rng rng(GetParam());
  Tensor w = RandomTensor({2, 1, 3, 3}, rng);
  Tensor b = RandomTensor({2}, rng, -0.1, 0.1);
  Tensor dw = RandomTensor({2 * 3 * 3, 3}, rng);
  Tensor db = RandomTensor({3}, rng);
  auto f = [&](const Tensor& in) {
    Tensor h = ops::Relu(ops::Conv2d(in, w, b, {2, 2}, Padding::kSame));
    Tensor logits = ops::Dense(ops::Reshape(h, {h.numel()}), dw, db);
    return ops::SoftmaxXent(logits, 1);
  };
  EXPECT_LT(FiniteDiffCheck(f, RandomTensor({1, 5, 5}, rng)).max_relative_error, 1e-4);
}

double Cosine(const Tensor& u, const Tensor& v) {
  double uv = 0, uu = 0, vv = 0;
  for (int64_t i = 0; i < u.numel(); ++i) {
    uv += u.data()[i] * v.data()[i];
    uu += u.data()[i] * u.data()[i];
    vv += v.data()[i] * v.data()[i];
  }
  return uv / std::sqrt(uu * vv);
}

TEST_P(PrimitiveGradientTest, TripletLoss) {
  Rng rng(GetParam());
  const double alpha = 0.1;
  Tensor a, p, n;
  // Redraw until the hinge is clearly on one side; even seeds force it on by
  // placing the negative near the anchor.
  for (;;) {
    a = RandomTensor({8}, rng);
    p = RandomTensor({8}, rng);
    n = RandomTensor({8}, rng);
    if (GetParam() % 2 == 0) {
      std::vector<double> v(a.data().begin(), a.data().end());
      for (double& x : v) x += 0.3 * rng.Uniform(-1, 1);
      n = Tensor::FromVector({8}, v);
    }
    const double margin = Cosine(a, n) - Cosine(a, p) + alpha;
    if (std::abs(margin) < 1e-3) continue;
    if (GetParam() % 2 == 0 && margin < 0) continue;
    break;
  }
  auto check = [&](int which) {
    Tensor point = which == 0 ? a : which == 1 ? p : n;
    return FiniteDiffCheck(
               [&](const Tensor& v) {
                 return ops::TripletLoss(which == 0 ? v : a, which == 1 ? v : p,
                                         which == 2 ? v : n, alpha);
               },
               point)
        .max_relative_error;
  };
  EXPECT_LT(check(0), 1e-4);
  EXPECT_LT(check(1), 1e-4);
  EXPECT_LT(check(2), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Seeds, PrimitiveGradientTest,
                         ::testing::Range<uint64_t>(1, 21));

TEST(AdamTest, ZeroGradientLeavesParamUnchanged) {
  Tensor p = Tensor::FromVector({3}, {1, -2, 3});
  AdamState s(3);
  std::vector<double> g(3, 0.0);
  AdamStep(p, g, s);
  EXPECT_EQ(p.data()[0], 1.0);
  EXPECT_EQ(p.data()[1], -2.0);
  EXPECT_EQ(p.data()[2], 3.0);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  Tensor p = Tensor::Scalar(0.0);
  AdamState s(1);
  std::vector<double> g{1.0};
  AdamStep(p, g, s);
  EXPECT_NEAR(p.item(), -0.001 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(s.t, 1);
  AdamStep(p, g, s);
  EXPECT_EQ(s.t, 2);
}

TEST(AdamTest, DefaultsAreTheConventionalValues) {
  AdamHyper h;
  EXPECT_EQ(h.lr, 1e-3);
  EXPECT_EQ(h.beta1, 0.9);
  EXPECT_EQ(h.beta2, 0.999);
  EXPECT_EQ(h.eps, 1e-8);
}

TEST(AdamTest, ZeroLearningRateIsIdentity) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor p = RandomTensor({6}, rng, -5, 5);
    std::vector<double> before(p.data().begin(), p.data().end());
    AdamState s(6, AdamHyper{.lr = 0.0});
    for (int step = 0; step < 3; ++step) {
      std::vector<double> g(6);
      for (double& x : g) x = rng.Uniform(-100, 100);
      AdamStep(p, g, s);
    }
    for (int i = 0; i < 6; ++i) EXPECT_EQ(p.data()[i], before[i]);
    for (double v : s.v) EXPECT_GE(v, 0.0);
  }
}

TEST(AdamTest, NonFiniteGradientIsNumericErrorAndNoUpdate) {
  Tensor p = Tensor::Scalar(1.0);
  AdamState s(1);
  std::vector<double> g{std::nan("")};
  EXPECT_EQ(CodeOf([&] { AdamStep(p, g, s); }), ErrorCode::kNumeric);
  EXPECT_EQ(p.item(), 1.0);
  EXPECT_EQ(s.t, 0);
}

TEST(AdamTest, OptimizerMatchesPerTensorSteps) {
  Tensor a = Tensor::FromVector({2}, {1, 2}, true);
  Tensor ref = a.Detach();
  AdamState ref_state(2);
  Adam opt({a}, AdamHyper{});
  for (int step = 0; step < 4; ++step) {
    opt.ZeroGrad();
    Backward(ops::Dot(a, a));
    std::vector<double> g{2 * ref.data()[0], 2 * ref.data()[1]};
    AdamStep(ref, g, ref_state);
    opt.Step();
  }
  EXPECT_EQ(opt.steps(), 4);
  EXPECT_EQ(a.data()[0], ref.data()[0]);
  EXPECT_EQ(a.data()[1], ref.data()[1]);
}

}  // namespace
}  // namespace biogate
