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

// Belief over which model is best, stored as normalized log weights.

#ifndef ACTSEL_POSTERIOR_H_
#define ACTSEL_POSTERIOR_H_

#include <cstddef>
#include <span>
#include <vector>

#include "actsel/core.h"

namespace actsel {

class WeakJudgePanel;

// log(sum(exp(values))), stable for large negative inputs. Returns -inf for
// an empty span.
double LogSumExp(std::span<const double> values);

// Shannon entropy in nats of a probability vector; 0 log 0 = 0.
double Entropy(std::span<const double> probabilities);

// Categorical posterior P(F = f_j | annotations), indexed by model position.
// Values are immutable; every update returns a new posterior.
class Posterior {
 public:
  // Throws Error(kInvalidArgument) if num_models == 0.
  static Posterior Uniform(std::size_t num_models);

  // Normalizes arbitrary log weights.
  static Posterior FromLogWeights(std::vector<double> log_weights);

  std::size_t size() const { return log_weights_.size(); }
  const std::vector<double>& log_weights() const { return log_weights_; }
  std::vector<double> Probabilities() const;
  double Probability(ModelIndex j) const;

  // Multiplies in eps_loss / eps_draw / eps_win per model according to its
  // outcome and renormalizes. Throws Error(kInvalidArgument) when the
  // outcome vector does not cover every model.
  Posterior Update(std::span<const Outcome> outcomes,
                   const NoiseParams& params) const;
  Posterior Update(const JudgmentVector& vector,
                   const NoiseParams& params) const {
    return Update(vector.outcomes, params);
  }

  double Entropy() const;

  // Entropy of Update(outcomes, params) without materializing it.
  double EntropyAfter(std::span<const Outcome> outcomes,
                      const NoiseParams& params) const;

 private:
  explicit Posterior(std::vector<double> log_weights)
      : log_weights_(std::move(log_weights)) {}

  std::vector<double> log_weights_;
};

// Update using weak judge `judge`'s decisions on query q as the outcome
// vector. Throws Error(kInvalidArgument) if the panel does not cover q.
Posterior HypotheticalUpdate(const Posterior& posterior,
                             const WeakJudgePanel& panel, QueryIndex q,
                             int judge, const NoiseParams& params);

}  // namespace actsel

#endif  // ACTSEL_POSTERIOR_H_
