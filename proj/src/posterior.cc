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

#include "actsel/posterior.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "actsel/error.h"
#include "actsel/ngram.h"

namespace actsel {

double LogSumExp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double max = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double Entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

Posterior Posterior::Uniform(std::size_t num_models) {
  if (num_models == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "posterior needs at least one model");
  }
  return Posterior(std::vector<double>(
      num_models, -std::log(static_cast<double>(num_models))));
}

Posterior Posterior::FromLogWeights(std::vector<double> log_weights) {
  if (log_weights.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "posterior needs at least one model");
  }
  const double z = LogSumExp(log_weights);
  for (double& w : log_weights) w -= z;
  return Posterior(std::move(log_weights));
}

std::vector<double> Posterior::Probabilities() const {
  std::vector<double> p(log_weights_.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::exp(log_weights_[j]);
  return p;
}

double Posterior::Probability(ModelIndex j) const {
  return std::exp(log_weights_.at(j));
}

Posterior Posterior::Update(std::span<const Outcome> outcomes,
                            const NoiseParams& params) const {
  if (outcomes.size() != log_weights_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "outcome vector does not cover every model");
  }
  std::vector<double> next(log_weights_.size());
  for (std::size_t j = 0; j < next.size(); ++j) {
    next[j] = log_weights_[j] + params.LogFactor(outcomes[j]);
  }
  return FromLogWeights(std::move(next));
}

double Posterior::Entropy() const {
  double h = 0.0;
  for (double w : log_weights_) {
    if (std::isfinite(w)) h -= std::exp(w) * w;
  }
  return h;
}

double Posterior::EntropyAfter(std::span<const Outcome> outcomes,
                               const NoiseParams& params) const {
  if (outcomes.size() != log_weights_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "outcome vector does not cover every model");
  }
  const std::size_t m = log_weights_.size();
  double max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    max = std::max(max, log_weights_[j] + params.LogFactor(outcomes[j]));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    sum += std::exp(log_weights_[j] + params.LogFactor(outcomes[j]) - max);
  }
  const double log_z = max + std::log(sum);
  double h = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double lp = log_weights_[j] + params.LogFactor(outcomes[j]) - log_z;
    if (std::isfinite(lp)) h -= std::exp(lp) * lp;
  }
  return h;
}

Posterior HypotheticalUpdate(const Posterior& posterior,
                             const WeakJudgePanel& panel, QueryIndex q,
                             int judge, const NoiseParams& params) {
  if (q >= panel.num_queries() || judge < 1 || judge > panel.judges()) {
    throw Error(ErrorKind::kInvalidArgument,
                "weak-judge panel does not cover the requested query/judge");
  }
  return posterior.Update(panel.JudgeVector(q, judge), params);
}

}  // namespace actsel
