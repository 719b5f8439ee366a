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


#ifndef BIOGATE_METRICS_H_
#define BIOGATE_METRICS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace biogate {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  int64_t classes = 0;
  std::vector<int64_t> counts;

  int64_t at(int64_t truth, int64_t pred) const { return counts[truth * classes + pred]; }
  int64_t total() const;
};

// `classes` of 0 sizes the matrix from the largest label seen.
ConfusionMatrix Confusion(std::span<const int64_t> preds, std::span<const int64_t> truth,
                          int64_t classes = 0);

struct ClassificationMetrics {
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  // Set where the denominator was empty and the value was reported as 0.
  std::vector<bool> precision_undefined;
  std::vector<bool> recall_undefined;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
};

ClassificationMetrics ComputeClassificationMetrics(const ConfusionMatrix& cm);

double HarmonicMean(double a, double b);

// Whether a reported (precision, recall, F1) tuple, all in percent, is
// self-consistent: |F1 - HM(P, R)| <= tolerance_points.
bool ReportedF1Consistent(double precision_pct, double recall_pct, double f1_pct,
                          double tolerance_points = 0.5);

void WriteConfusion(std::ostream& out, const ConfusionMatrix& cm);
void WriteClassificationReport(std::ostream& out, const ClassificationMetrics& m);

struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

// Acceptance is score >= threshold.
double FalseAcceptRate(const ScoreSet& scores, double threshold);
double FalseRejectRate(const ScoreSet& scores, double threshold);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Interpolated FAR/FRR crossing over the sorted distinct scores plus one
// sentinel on each side. Throws kContract on an empty side or a non-finite
// score.
EerResult ComputeEer(const ScoreSet& scores);

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

// `n_points` evenly spaced thresholds from just below the smallest score to
// just above the largest.
std::vector<DetPoint> DetCurve(const ScoreSet& scores, int n_points);
void WriteDet(std::ostream& out, std::span<const DetPoint> points);

double PairAccuracy(const ScoreSet& scores, double threshold);

// "<genuine|impostor>\t<score>" per line.
ScoreSet ReadScores(std::istream& in);
void WriteScores(std::ostream& out, const ScoreSet& scores);

}  // namespace biogate

#endif  // BIOGATE_METRICS_H_
