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

// Regularized Bradley-Terry fit for candidate-vs-baseline comparisons.

#ifndef ACTSEL_BRADLEY_TERRY_H_
#define ACTSEL_BRADLEY_TERRY_H_

#include <cstddef>
#include <span>
#include <vector>

#include "actsel/core.h"

namespace actsel {

inline constexpr double kDefaultBtRegularization = 0.1;
inline constexpr double kBtTolerance = 1e-12;
inline constexpr int kBtMaxIterations = 100;
inline constexpr int kBtMaxMmIterations = 100000;

// Sufficient statistics: every comparison is candidate j vs the baseline, so
// per-model win and loss totals (draws split in half) determine the
// likelihood.
struct BaselineRecord {
  explicit BaselineRecord(std::size_t num_models, ModelIndex baseline)
      : baseline(baseline), wins(num_models, 0.0), losses(num_models, 0.0) {}

  void Add(std::span<const Outcome> outcomes, double weight = 1.0);

  ModelIndex baseline;
  // Wins / losses of candidate j against the baseline.
  std::vector<double> wins;
  std::vector<double> losses;
};

BaselineRecord RecordFromAnnotations(const AnnotationSet& annotations,
                                     std::size_t num_models,
                                     ModelIndex baseline);

struct BTFit {
  // Normalized to sum 1.
  std::vector<double> strengths;
  // Solver-scale strengths; usable as a warm start.
  std::vector<double> raw;
  double regularization = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Maximum-likelihood BT strengths. Each model also gets `regularization`
// pseudo-wins and pseudo-losses against a fixed virtual opponent of strength
// 1/m, which anchors the scale and keeps the MLE finite under separation.
// With a positive anchor the penalized likelihood is strictly concave in log
// strengths and is maximized by damped Newton steps (stopping once a step is
// below kBtTolerance); without it, minorization-maximization runs with the
// strength sum pinned to 1. `warm_start`, when nonempty, is a previous fit's
// `raw` vector and only changes the iteration count.
BTFit FitBradleyTerry(const BaselineRecord& record, double regularization,
                      std::span<const double> warm_start = {});

BTFit FitBradleyTerry(const AnnotationSet& annotations,
                      std::size_t num_models, ModelIndex baseline,
                      double regularization = kDefaultBtRegularization);

}  // namespace actsel

#endif  // ACTSEL_BRADLEY_TERRY_H_
