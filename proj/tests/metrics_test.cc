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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biogate/error.h"
#include "biogate/metrics.h"
#include "biogate/random.h"

namespace biogate {
namespace {

// Reference EER: evaluate FAR/FRR by direct counting at both sentinels and
// at every midpoint between adjacent distinct scores, then locate where
// FAR - FRR changes sign and solve the segment for FAR == FRR.
double BruteForceEer(const ScoreSet& s) {
  std::vector<double> all = s.genuine;
  all.insert(all.end(), s.impostor.begin(), s.impostor.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> ts = {all.front() - 1.0};
  for (size_t i = 0; i + 1 < all.size(); ++i) ts.push_back(0.5 * (all[i] + all[i + 1]));
  ts.push_back(all.back() + 1.0);

  std::vector<double> far, frr;
  for (double t : ts) {
    double fa = 0, fr = 0;
    for (double x : s.impostor) fa += (x >= t) ? 1 : 0;
    for (double x : s.genuine) fr += (x < t) ? 1 : 0;
    far.push_back(fa / s.impostor.size());
    frr.push_back(fr / s.genuine.size());
  }
  for (size_t k = 0; k + 1 < ts.size(); ++k) {
    const double a0 = far[k] - frr[k], a1 = far[k + 1] - frr[k + 1];
    if (a0 == 0) return far[k];
    if (a0 > 0 && a1 <= 0) {
      if (a1 == 0) return far[k + 1];
      // far(l) - frr(l) = a0 + l (a1 - a0) = 0
      const double l = a0 / (a0 - a1);
      return far[k] + l * (far[k + 1] - far[k]);
    }
  }
  return -1;
}

ScoreSet RandomScores(Rng& rng) {
  ScoreSet s;
  const int ng = 1 + static_cast<int>(rng.Below(200));
  const int ni = 1 + static_cast<int>(rng.Below(200));
  const double shift = rng.Uniform(-1, 2);
  // A third of the sets are quantized so that ties across sides occur.
  const bool quantize = rng.Below(3) == 0;
  auto draw = [&](double mean) {
    double v = mean + rng.Normal() * 0.5;
    return quantize ? std::round(v * 8) / 8 : v;
  };
  for (int i = 0; i < ng; ++i) s.genuine.push_back(draw(shift));
  for (int i = 0; i < ni; ++i) s.impostor.push_back(draw(0.0));
  return s;
}

TEST(ConfusionTest, Examples) {
  std::vector<int64_t> truth = {0, 0, 1, 1}, preds = {0, 1, 1, 1};
  ConfusionMatrix cm = Confusion(preds, truth);
  EXPECT_EQ(cm.classes, 2);
  EXPECT_EQ(cm.counts, (std::vector<int64_t>{1, 1, 0, 2}));
  ConfusionMatrix diag = Confusion(truth, truth);
  EXPECT_EQ(diag.counts, (std::vector<int64_t>{2, 0, 0, 2}));
}

TEST(ConfusionTest, Errors) {
  std::vector<int64_t> empty;
  std::vector<int64_t> a = {0, 1}, b = {0};
  EXPECT_THROW(Confusion(empty, empty), Error);
  EXPECT_THROW(Confusion(a, b), Error);
  EXPECT_THROW(Confusion(a, a, 1), Error);
}

TEST(ClassificationTest, DiagonalIsPerfect) {
  ConfusionMatrix cm{3, {4, 0, 0, 0, 2, 0, 0, 0, 7}};
  auto m = ComputeClassificationMetrics(cm);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_f1, 1.0);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(m.precision[c], 1.0);
    EXPECT_EQ(m.recall[c], 1.0);
  }
}

TEST(ClassificationTest, HandComputedTwoByTwo) {
  auto m = ComputeClassificationMetrics(ConfusionMatrix{2, {2, 0, 1, 1}});
  EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
  EXPECT_NEAR(m.precision[0], 0.6667, 1e-4);
  EXPECT_EQ(m.precision[1], 1.0);
  EXPECT_EQ(m.recall[0], 1.0);
  EXPECT_EQ(m.recall[1], 0.5);
  EXPECT_NEAR(m.macro_f1, 0.7333, 1e-4);
}

TEST(ClassificationTest, EmptyDenominatorFlaggedAsZero) {
  // Class 2 is never predicted and never true.
  auto m = ComputeClassificationMetrics(ConfusionMatrix{3, {1, 0, 0, 1, 1, 0, 0, 0, 0}});
  EXPECT_EQ(m.precision[2], 0.0);
  EXPECT_TRUE(m.precision_undefined[2]);
  EXPECT_TRUE(m.recall_undefined[2]);
  EXPECT_FALSE(m.precision_undefined[0]);
  EXPECT_EQ(m.f1[2], 0.0);
}

TEST(ClassificationTest, AccuracyIsTraceOverTotalExhaustive) {
  for (int k : {1, 2, 3}) {
    const int cells = k * k;
    const int base = k == 3 ? 2 : 4;
    int64_t combos = 1;
    for (int i = 0; i < cells; ++i) combos *= base;
    for (int64_t code = 0; code < combos; ++code) {
      ConfusionMatrix cm{k, std::vector<int64_t>(cells)};
      int64_t c = code, trace = 0, total = 0;
      for (int i = 0; i < cells; ++i) {
        cm.counts[i] = c % base;
        c /= base;
        total += cm.counts[i];
        if (i / k == i % k) trace += cm.counts[i];
      }
      if (total == 0) continue;
      auto m = ComputeClassificationMetrics(cm);
      ASSERT_EQ(m.accuracy, static_cast<double>(trace) / static_cast<double>(total));
    }
  }
}

TEST(ClassificationTest, MacroF1AtMostOneAndOneOnlyWhenDiagonal) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const int64_t k = 2 + static_cast<int64_t>(rng.Below(5));
    ConfusionMatrix cm{k, std::vector<int64_t>(k * k)};
    const bool diagonal = rng.Below(4) == 0;
    bool is_diag = true;
    for (int64_t t = 0; t < k; ++t) {
      for (int64_t p = 0; p < k; ++p) {
        if (t == p) {
          cm.counts[t * k + p] = 1 + static_cast<int64_t>(rng.Below(5));
        } else if (!diagonal) {
          cm.counts[t * k + p] = static_cast<int64_t>(rng.Below(3));
          if (cm.counts[t * k + p]) is_diag = false;
        }
      }
    }
    auto m = ComputeClassificationMetrics(cm);
    ASSERT_LE(m.macro_f1, 1.0);
    ASSERT_EQ(m.macro_f1 == 1.0, is_diag);
    double mean = 0;
    for (int64_t c = 0; c < k; ++c) {
      ASSERT_NEAR(m.f1[c], HarmonicMean(m.precision[c], m.recall[c]), 1e-12);
      mean += m.f1[c];
    }
    ASSERT_NEAR(m.macro_f1, mean / k, 1e-12);
    ASSERT_NEAR(m.micro_f1, m.accuracy, 1e-12);
  }
}

TEST(ClassificationTest, PublishedTupleIsConsistent) {
  EXPECT_TRUE(ReportedF1Consistent(96.317, 95.153, 95.732));
  EXPECT_NEAR(HarmonicMean(96.317, 95.153), 95.731, 1e-3);
  EXPECT_FALSE(ReportedF1Consistent(96.317, 95.153, 94.0));
}

TEST(EerTest, Examples) {
  auto separable = ComputeEer({{0.9, 0.8}, {0.1, 0.2}});
  EXPECT_EQ(separable.eer, 0.0);
  EXPECT_GT(separable.threshold, 0.2);
  EXPECT_LE(separable.threshold, 0.8);
  EXPECT_EQ(ComputeEer({{0.1}, {0.9}}).eer, 1.0);
  EXPECT_EQ(ComputeEer({{0.8, 0.4}, {0.6, 0.2}}).eer, 0.5);
}

TEST(EerTest, EmptySideIsContractError) {
  try {
    ComputeEer({{}, {0.3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContract);
  }
  EXPECT_THROW(ComputeEer({{0.3}, {}}), Error);
  EXPECT_THROW(ComputeEer({{std::nan("")}, {0.1}}), Error);
}

TEST(EerTest, MatchesBruteForceOnRandomSets) {
  Rng rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    ScoreSet s = RandomScores(rng);
    const double expected = BruteForceEer(s);
    const EerResult got = ComputeEer(s);
    ASSERT_NEAR(got.eer, expected, 1e-9) << "trial " << trial;
    ASSERT_GE(got.eer, 0.0);
    ASSERT_LE(got.eer, 1.0);
  }
}

TEST(EerTest, ThresholdReevaluatesWithinOneQuantum) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    ScoreSet s;
    const int n = 5 + static_cast<int>(rng.Below(100));
    for (int i = 0; i < n; ++i) s.genuine.push_back(rng.Normal() + 1);
    for (int i = 0; i < n + 3; ++i) s.impostor.push_back(rng.Normal());
    const EerResult r = ComputeEer(s);
    const double quantum = 1.0 / std::min(s.genuine.size(), s.impostor.size());
    EXPECT_LE(std::abs(FalseAcceptRate(s, r.threshold) - FalseRejectRate(s, r.threshold)),
              quantum + 1e-12);
  }
}

TEST(EerTest, InvariantUnderMonotoneTransform) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreSet s = RandomScores(rng);
    ScoreSet t = s;
    for (double& x : t.genuine) x = std::exp(x) + x * x * x;
    for (double& x : t.impostor) x = std::exp(x) + x * x * x;
    ASSERT_NEAR(ComputeEer(s).eer, ComputeEer(t).eer, 1e-12);
  }
}

TEST(DetTest, EndsAndMonotonicity) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreSet s = RandomScores(rng);
    auto det = DetCurve(s, 2 + static_cast<int>(rng.Below(60)));
    EXPECT_EQ(det.front().far, 1.0);
    EXPECT_EQ(det.front().frr, 0.0);
    EXPECT_EQ(det.back().far, 0.0);
    EXPECT_EQ(det.back().frr, 1.0);
    for (size_t i = 1; i < det.size(); ++i) {
      ASSERT_GT(det[i].threshold, det[i - 1].threshold);
      ASSERT_LE(det[i].far, det[i - 1].far);
      ASSERT_GE(det[i].frr, det[i - 1].frr);
    }
  }
}

TEST(PairAccuracyTest, Examples) {
  ScoreSet separable{{0.9, 0.8}, {0.1, 0.2}};
  EXPECT_EQ(PairAccuracy(separable, 0.5), 1.0);
  EXPECT_EQ(PairAccuracy(separable, -5.0), 0.5);
  EXPECT_EQ(PairAccuracy({{0.8, 0.4}, {0.6, 0.2}}, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(PairAccuracy({{0.8}, {0.6, 0.2}}, -1.0), 1.0 / 3.0);
}

TEST(ScoreFileTest, RoundTripAndErrors) {
  ScoreSet s{{0.8, 0.1 + 0.2}, {-1e-300, 0.6}};
  std::stringstream ss;
  WriteScores(ss, s);
  ScoreSet back = ReadScores(ss);
  EXPECT_EQ(back.genuine, s.genuine);
  EXPECT_EQ(back.impostor, s.impostor);
  std::istringstream bad("genuine\t0.5\nmystery\t0.1\n");
  try {
    ReadScores(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

}  // namespace
}  // namespace biogate
