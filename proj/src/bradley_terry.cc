// Copyright 2026 The actsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "actsel/bradley_terry.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "actsel/error.h"

namespace actsel {

void BaselineRecord::Add(std::span<const Outcome> outcomes, double weight) {
  if (outcomes.size() != wins.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "outcome vector does not cover every model");
  }
  for (ModelIndex j = 0; j < outcomes.size(); ++j) {
    if (j == baseline) continue;
    switch (outcomes[j]) {
      case Outcome::kWin:
        wins[j] += weight;
        break;
      case Outcome::kLoss:
        losses[j] += weight;
        break;
      case Outcome::kDraw:
        wins[j] += 0.5 * weight;
        losses[j] += 0.5 * weight;
        break;
    }
  }
}

BaselineRecord RecordFromAnnotations(const AnnotationSet& annotations,
                                     std::size_t num_models,
                                     ModelIndex baseline) {
  BaselineRecord record(num_models, baseline);
  for (const JudgmentVector& v : annotations.vectors()) record.Add(v.outcomes);
  return record;
}

namespace {

// Solves A x = rhs in place by Gaussian elimination with partial pivoting.
// A is small (one row per model) and negative definite here.
std::vector<double> Solve(std::vector<double> a, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r * n + c]) > std::fabs(a[pivot * n + c])) pivot = r;
    }
    if (pivot != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
      std::swap(rhs[c], rhs[pivot]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double v = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= a[i * n + k] * x[k];
    x[i] = v / a[i * n + i];
  }
  return x;
}

double Log1pExp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Problem {
  ModelIndex baseline;
  double lambda;
  double log_anchor;
  std::vector<double> wins, losses;

  // Penalized log-likelihood in log-strength coordinates (constants
  // dropped).
  double Objective(const std::vector<double>& t) const {
    const ModelIndex b = baseline;
    double f = 0.0;
    for (ModelIndex j = 0; j < t.size(); ++j) {
      f += lambda * (t[j] - 2.0 * (log_anchor + Log1pExp(t[j] - log_anchor)));
      if (j == b) continue;
      const double g = wins[j] + losses[j];
      f += wins[j] * t[j] + losses[j] * t[b] -
           g * (t[b] + Log1pExp(t[j] - t[b]));
    }
    return f;
  }
};

// Newton ascent on the strictly concave penalized likelihood (lambda > 0).
void FitNewton(const Problem& pr, std::vector<double>& t, BTFit& fit) {
  const std::size_t m = t.size();
  const ModelIndex b = pr.baseline;
  std::vector<double> grad(m), hess(m * m), trial(m);
  double f = pr.Objective(t);
  for (int it = 1; it <= kBtMaxIterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (ModelIndex j = 0; j < m; ++j) {
      const double s = Sigmoid(t[j] - pr.log_anchor);
      grad[j] += pr.lambda * (1.0 - 2.0 * s);
      hess[j * m + j] -= 2.0 * pr.lambda * s * (1.0 - s);
      if (j == b) continue;
      const double g = pr.wins[j] + pr.losses[j];
      const double sj = Sigmoid(t[j] - t[b]);
      const double c = g * sj * (1.0 - sj);
      grad[j] += pr.wins[j] - g * sj;
      grad[b] += pr.losses[j] - g * (1.0 - sj);
      hess[j * m + j] -= c;
      hess[b * m + b] -= c;
      hess[j * m + b] += c;
      hess[b * m + j] += c;
    }
    std::vector<double> neg(m);
    for (std::size_t k = 0; k < m; ++k) neg[k] = -grad[k];
    const std::vector<double> step = Solve(hess, neg);
    double slope = 0.0, size = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      slope += grad[k] * step[k];
      size = std::max(size, std::fabs(step[k]));
    }
    fit.iterations = it;
    if (!(size > kBtTolerance) || !(slope > 0.0)) {
      fit.converged = std::isfinite(size);
      return;
    }
    if (slope <= 1e-13 * (1.0 + std::fabs(f))) {
      // The predicted gain is below the objective's rounding noise, so a
      // line search cannot judge the step; inside the quadratic region the
      // full Newton step is the accurate one.
      for (std::size_t i = 0; i < m; ++i) t[i] += step[i];
      fit.converged = std::isfinite(size);
      return;
    }
    // Backtracking keeps every iterate an ascent step.
    double alpha = 1.0;
    double next_f = f;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = t[i] + alpha * step[i];
      next_f = pr.Objective(trial);
      if (next_f >= f + 1e-4 * alpha * slope) break;
    }
    t.swap(trial);
    f = next_f;
  }
}

// Minorization-maximization; used without the anchor, where the scale is
// free and the sum of strengths is pinned instead.
void FitMm(const BaselineRecord& record, std::vector<double>& p, BTFit& fit) {
  const std::size_t m = p.size();
  const ModelIndex b = record.baseline;
  std::vector<double> credited(m, 0.0), games(m, 0.0), next(m);
  for (ModelIndex j = 0; j < m; ++j) {
    if (j == b) continue;
    credited[j] += record.wins[j];
    credited[b] += record.losses[j];
    games[j] = record.wins[j] + record.losses[j];
  }
  for (int it = 1; it <= kBtMaxMmIterations; ++it) {
    double baseline_denom = 0.0;
    for (ModelIndex j = 0; j < m; ++j) {
      if (j == b) continue;
      const double pair = games[j] / (p[j] + p[b]);
      baseline_denom += pair;
      next[j] = pair > 0.0 ? credited[j] / pair : p[j];
    }
    next[b] = baseline_denom > 0.0 ? credited[b] / baseline_denom : p[b];
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    if (total > 0.0) {
      for (double& v : next) v /= total;
    }
    double max_change = 0.0;
    for (ModelIndex j = 0; j < m; ++j) {
      const double scale = std::max(std::fabs(p[j]), 1e-300);
      max_change = std::max(max_change, std::fabs(next[j] - p[j]) / scale);
    }
    p.swap(next);
    fit.iterations = it;
    if (max_change < kBtTolerance) {
      fit.converged = true;
      return;
    }
  }
}

}  // namespace

BTFit FitBradleyTerry(const BaselineRecord& record, double regularization,
                      std::span<const double> warm_start) {
  const std::size_t m = record.wins.size();
  if (m == 0) throw Error(ErrorKind::kInvalidArgument, "no models");
  if (!(regularization >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "regularization must be nonnegative");
  }
  const double anchor = 1.0 / static_cast<double>(m);
  std::vector<double> p(m, anchor);
  if (!warm_start.empty()) {
    if (warm_start.size() != m) {
      throw Error(ErrorKind::kInvalidArgument, "warm start has wrong size");
    }
    for (double v : warm_start) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "warm start strengths must be positive");
      }
    }
    p.assign(warm_start.begin(), warm_start.end());
  }

  BTFit fit;
  fit.regularization = regularization;
  if (regularization > 0.0) {
    Problem pr{record.baseline, regularization, std::log(anchor), record.wins,
               record.losses};
    std::vector<double> t(m);
    for (ModelIndex j = 0; j < m; ++j) t[j] = std::log(p[j]);
    FitNewton(pr, t, fit);
    for (ModelIndex j = 0; j < m; ++j) p[j] = std::exp(t[j]);
  } else {
    FitMm(record, p, fit);
  }
  fit.raw = p;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  fit.strengths.resize(m);
  for (ModelIndex j = 0; j < m; ++j) {
    fit.strengths[j] =
        total > 0.0 ? p[j] / total : 1.0 / static_cast<double>(m);
  }
  return fit;
}

BTFit FitBradleyTerry(const AnnotationSet& annotations,
                      std::size_t num_models, ModelIndex baseline,
                      double regularization) {
  return FitBradleyTerry(
      RecordFromAnnotations(annotations, num_models, baseline),
      regularization);
}

}  // namespace actsel
