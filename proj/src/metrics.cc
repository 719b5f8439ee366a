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


#include "biogate/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "biogate/error.h"

namespace biogate {

namespace {

double Ratio(int64_t num, int64_t den, bool* undefined) {
  if (undefined) *undefined = den == 0;
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void CheckScores(const ScoreSet& scores) {
  Require(!scores.genuine.empty() && !scores.impostor.empty(), ErrorCode::kContract,
          "score set needs at least one genuine and one impostor score");
  for (const auto* side : {&scores.genuine, &scores.impostor}) {
    for (double s : *side) {
      Require(std::isfinite(s), ErrorCode::kContract, "score set contains a non-finite score");
    }
  }
}

std::vector<double> Sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Fraction of sorted values >= t, and fraction < t.
double FractionAtLeast(const std::vector<double>& sorted, double t) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}
double FractionBelow(const std::vector<double>& sorted, double t) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

}  // namespace

int64_t ConfusionMatrix::total() const {
  int64_t n = 0;
  for (int64_t c : counts) n += c;
  return n;
}

ConfusionMatrix Confusion(std::span<const int64_t> preds, std::span<const int64_t> truth,
                          int64_t classes) {
  Require(preds.size() == truth.size(), ErrorCode::kContract,
          "predictions and labels differ in length");
  Require(!preds.empty(), ErrorCode::kContract, "confusion matrix of no samples");
  int64_t k = classes;
  if (k == 0) {
    for (size_t i = 0; i < preds.size(); ++i) k = std::max({k, preds[i] + 1, truth[i] + 1});
  }
  ConfusionMatrix cm;
  cm.classes = k;
  cm.counts.assign(static_cast<size_t>(k * k), 0);
  for (size_t i = 0; i < preds.size(); ++i) {
    Require(preds[i] >= 0 && preds[i] < k && truth[i] >= 0 && truth[i] < k,
            ErrorCode::kContract, "label outside [0, " + std::to_string(k) + ")");
    ++cm.counts[truth[i] * k + preds[i]];
  }
  return cm;
}

double HarmonicMean(double a, double b) {
  return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b);
}

ClassificationMetrics ComputeClassificationMetrics(const ConfusionMatrix& cm) {
  const int64_t k = cm.classes;
  const int64_t total = cm.total();
  Require(total > 0, ErrorCode::kContract, "metrics of an empty confusion matrix");
  ClassificationMetrics m;
  int64_t correct = 0;
  for (int64_t c = 0; c < k; ++c) {
    int64_t row = 0, col = 0;
    for (int64_t j = 0; j < k; ++j) {
      row += cm.at(c, j);
      col += cm.at(j, c);
    }
    const int64_t tp = cm.at(c, c);
    correct += tp;
    bool p_undef = false, r_undef = false;
    m.precision.push_back(Ratio(tp, col, &p_undef));
    m.recall.push_back(Ratio(tp, row, &r_undef));
    m.precision_undefined.push_back(p_undef);
    m.recall_undefined.push_back(r_undef);
    m.f1.push_back(HarmonicMean(m.precision.back(), m.recall.back()));
  }
  m.accuracy = Ratio(correct, total, nullptr);
  for (int64_t c = 0; c < k; ++c) {
    m.macro_precision += m.precision[c];
    m.macro_recall += m.recall[c];
    m.macro_f1 += m.f1[c];
  }
  m.macro_precision /= static_cast<double>(k);
  m.macro_recall /= static_cast<double>(k);
  m.macro_f1 /= static_cast<double>(k);
  // Single-label classification: every miss is one FP and one FN.
  m.micro_precision = m.accuracy;
  m.micro_recall = m.accuracy;
  m.micro_f1 = HarmonicMean(m.micro_precision, m.micro_recall);
  return m;
}

bool ReportedF1Consistent(double precision_pct, double recall_pct, double f1_pct,
                          double tolerance_points) {
  return std::abs(f1_pct - HarmonicMean(precision_pct, recall_pct)) <= tolerance_points;
}

void WriteConfusion(std::ostream& out, const ConfusionMatrix& cm) {
  out << "truth\\pred";
  for (int64_t p = 0; p < cm.classes; ++p) out << '\t' << p;
  out << '\n';
  for (int64_t t = 0; t < cm.classes; ++t) {
    out << t;
    for (int64_t p = 0; p < cm.classes; ++p) out << '\t' << cm.at(t, p);
    out << '\n';
  }
}

void WriteClassificationReport(std::ostream& out, const ClassificationMetrics& m) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(6);
  out << "class\tprecision\trecall\tf1\n";
  for (size_t c = 0; c < m.f1.size(); ++c) {
    out << c << '\t' << m.precision[c] << (m.precision_undefined[c] ? "*" : "") << '\t'
        << m.recall[c] << (m.recall_undefined[c] ? "*" : "") << '\t' << m.f1[c] << '\n';
  }
  out << "accuracy\t" << m.accuracy << '\n'
      << "macro\t" << m.macro_precision << '\t' << m.macro_recall << '\t' << m.macro_f1 << '\n'
      << "micro\t" << m.micro_precision << '\t' << m.micro_recall << '\t' << m.micro_f1 << '\n';
  out.flags(flags);
}

double FalseAcceptRate(const ScoreSet& scores, double threshold) {
  CheckScores(scores);
  int64_t n = 0;
  for (double s : scores.impostor) n += s >= threshold;
  return static_cast<double>(n) / static_cast<double>(scores.impostor.size());
}

double FalseRejectRate(const ScoreSet& scores, double threshold) {
  CheckScores(scores);
  int64_t n = 0;
  for (double s : scores.genuine) n += s < threshold;
  return static_cast<double>(n) / static_cast<double>(scores.genuine.size());
}

EerResult ComputeEer(const ScoreSet& scores) {
  CheckScores(scores);
  const std::vector<double> gen = Sorted(scores.genuine);
  const std::vector<double> imp = Sorted(scores.impostor);

  std::vector<double> cand;
  cand.reserve(gen.size() + imp.size() + 2);
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(), std::back_inserter(cand));
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  cand.insert(cand.begin(), cand.front() - 1.0);
  cand.push_back(cand.back() + 1.0);

  auto diff = [&](size_t i, double* far, double* frr) {
    *far = FractionAtLeast(imp, cand[i]);
    *frr = FractionBelow(gen, cand[i]);
    return *far - *frr;
  };

  // FAR - FRR is non-increasing in the threshold: +1 at the low sentinel,
  // -1 at the high one.
  double prev_far = 0, prev_frr = 0;
  double prev_d = diff(0, &prev_far, &prev_frr);
  for (size_t i = 1; i < cand.size(); ++i) {
    double far = 0, frr = 0;
    const double d = diff(i, &far, &frr);
    if (d == 0.0) {
      // FAR == FRR on (cand[i-1], cand[j]] for the run of zero crossings.
      size_t j = i;
      double f2 = 0, r2 = 0;
      while (j + 1 < cand.size() && diff(j + 1, &f2, &r2) == 0.0) ++j;
      return {far, 0.5 * (cand[i - 1] + cand[j])};
    }
    if (d < 0.0) {
      const double lambda = prev_d / (prev_d - d);
      return {prev_far + lambda * (far - prev_far),
              cand[i - 1] + lambda * (cand[i] - cand[i - 1])};
    }
    prev_d = d;
    prev_far = far;
    prev_frr = frr;
  }
  Fail(ErrorCode::kNumeric, "no FAR/FRR crossing found");
}

std::vector<DetPoint> DetCurve(const ScoreSet& scores, int n_points) {
  CheckScores(scores);
  Require(n_points >= 2, ErrorCode::kContract, "DET curve needs at least two points");
  const std::vector<double> gen = Sorted(scores.genuine);
  const std::vector<double> imp = Sorted(scores.impostor);
  const double lo = std::min(gen.front(), imp.front());
  const double hi = std::max(gen.back(), imp.back());
  const double pad = hi > lo ? 0.01 * (hi - lo) : 0.5;
  const double start = lo - pad, stop = hi + pad;
  std::vector<DetPoint> points;
  points.reserve(static_cast<size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double t = i + 1 == n_points
                         ? stop
                         : start + (stop - start) * i / static_cast<double>(n_points - 1);
    points.push_back({t, FractionAtLeast(imp, t), FractionBelow(gen, t)});
  }
  return points;
}

void WriteDet(std::ostream& out, std::span<const DetPoint> points) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(10) << "threshold\tfar\tfrr\n";
  for (const DetPoint& p : points) out << p.threshold << '\t' << p.far << '\t' << p.frr << '\n';
  out.flags(flags);
  out.precision(precision);
}

double PairAccuracy(const ScoreSet& scores, double threshold) {
  CheckScores(scores);
  int64_t correct = 0;
  for (double s : scores.genuine) correct += s >= threshold;
  for (double s : scores.impostor) correct += s < threshold;
  return static_cast<double>(correct) /
         static_cast<double>(scores.genuine.size() + scores.impostor.size());
}

ScoreSet ReadScores(std::istream& in) {
  ScoreSet scores;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string kind;
    double score;
    std::string rest;
    Require(static_cast<bool>(fields >> kind >> score) && !(fields >> rest),
            ErrorCode::kFormat, "score line " + std::to_string(line_no) + " is malformed");
    if (kind == "genuine") {
      scores.genuine.push_back(score);
    } else if (kind == "impostor") {
      scores.impostor.push_back(score);
    } else {
      Fail(ErrorCode::kFormat, "score line " + std::to_string(line_no) +
                                   " has unknown kind '" + kind + "'");
    }
  }
  return scores;
}

void WriteScores(std::ostream& out, const ScoreSet& scores) {
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (double s : scores.genuine) out << "genuine\t" << s << '\n';
  for (double s : scores.impostor) out << "impostor\t" << s << '\n';
  out.precision(precision);
}

}  // namespace biogate
