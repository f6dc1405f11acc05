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

#include "actsel/strategies.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "actsel/error.h"

namespace actsel {

std::string_view StrategyName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kLlmSelector:
      return "llm-selector";
    case StrategyKind::kRandom:
      return "random";
    case StrategyKind::kBradleyTerry:
      return "bradley-terry";
    case StrategyKind::kMostDraws:
      return "most-draws";
    case StrategyKind::kUncertainty:
      return "uncertainty";
    case StrategyKind::kConfidence:
      return "confidence";
  }
  return "unknown";
}

std::optional<StrategyKind> ParseStrategyKind(std::string_view name) {
  for (StrategyKind kind : kAllStrategyKinds) {
    if (StrategyName(kind) == name) return kind;
  }
  return std::nullopt;
}

std::size_t ArgminFirst(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best] - kScoreTieTolerance) best = i;
  }
  return best;
}

std::size_t ArgmaxFirst(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] + kScoreTieTolerance) best = i;
  }
  return best;
}

SelectionState::SelectionState(const Dataset& dataset,
                               const WeakJudgePanel& panel,
                               std::vector<QueryIndex> pool,
                               NoiseParams params, std::size_t budget,
                               std::uint64_t seed)
    : dataset_(&dataset),
      panel_(&panel),
      pool_(std::move(pool)),
      unannotated_(pool_),
      posterior_(Posterior::Uniform(dataset.num_models())),
      params_(params),
      budget_(budget),
      rng_(seed) {
  if (panel.num_queries() != dataset.num_queries() ||
      panel.num_models() != dataset.num_models()) {
    throw Error(ErrorKind::kInvalidArgument,
                "weak-judge panel does not match the dataset");
  }
  if (panel.baseline() != dataset.baseline()) {
    throw Error(ErrorKind::kInvalidArgument,
                "weak-judge panel was built for a different baseline");
  }
  std::vector<bool> seen(dataset.num_queries(), false);
  for (QueryIndex q : pool_) {
    if (q >= dataset.num_queries() || seen[q]) {
      throw Error(ErrorKind::kInvalidArgument,
                  "pool has an out-of-range or repeated query");
    }
    seen[q] = true;
  }
  if (budget_ > pool_.size()) {
    throw Error(ErrorKind::kValidation, "budget exceeds pool size");
  }
}

void SelectionState::Record(QueryIndex q, JudgmentVector vector) {
  if (exhausted()) {
    throw Error(ErrorKind::kFailedPrecondition, "budget exhausted");
  }
  auto it = std::find(unannotated_.begin(), unannotated_.end(), q);
  if (it == unannotated_.end()) {
    throw Error(ErrorKind::kFailedPrecondition,
                "query is not pending annotation");
  }
  if (vector.outcomes.size() != num_models()) {
    throw Error(ErrorKind::kValidation,
                "judgment vector does not cover every model");
  }
  vector.query_id = dataset_->query(q).id;
  vector.outcomes[dataset_->baseline()] = Outcome::kDraw;
  posterior_ = posterior_.Update(vector.outcomes, params_);
  annotations_.Append(std::move(vector));
  unannotated_.erase(it);
  order_.push_back(q);
}

ModelIndex SelectionState::FinalModel() const {
  return SelectFinalModel(annotations_, posterior_.Probabilities(),
                          dataset_->baseline());
}

namespace {

void RequireNonEmpty(const SelectionState& state) {
  if (state.unannotated().empty()) {
    throw Error(ErrorKind::kFailedPrecondition, "budget exceeds pool");
  }
}

}  // namespace

double ExpectedHypotheticalEntropy(const Posterior& posterior,
                                   const WeakJudgePanel& panel, QueryIndex q,
                                   const NoiseParams& params) {
  double total = 0.0;
  for (int k = 1; k <= panel.judges(); ++k) {
    total += posterior.EntropyAfter(panel.JudgeVector(q, k), params);
  }
  return total / static_cast<double>(panel.judges());
}

QueryIndex SelectNextLlmSelector(const SelectionState& state) {
  RequireNonEmpty(state);
  const auto& pool = state.unannotated();
  std::vector<double> scores(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    scores[i] = ExpectedHypotheticalEntropy(state.posterior(), state.panel(),
                                            pool[i], state.params());
  }
  return pool[ArgminFirst(scores)];
}

QueryIndex SelectNextRandom(SelectionState& state) {
  RequireNonEmpty(state);
  const auto& pool = state.unannotated();
  return pool[UniformIndex(state.rng(), pool.size())];
}

double ExpectedBtEntropy(const BaselineRecord& record,
                         const WeakJudgePanel& panel, QueryIndex q,
                         double regularization,
                         std::span<const double> warm_start) {
  double total = 0.0;
  for (int k = 1; k <= panel.judges(); ++k) {
    BaselineRecord extended = record;
    extended.Add(panel.JudgeVector(q, k));
    BTFit fit = FitBradleyTerry(extended, regularization, warm_start);
    total += Entropy(fit.strengths);
  }
  return total / static_cast<double>(panel.judges());
}

QueryIndex SelectNextBradleyTerry(const SelectionState& state,
                                  double regularization,
                                  std::span<const double> warm_start) {
  RequireNonEmpty(state);
  const BaselineRecord record = RecordFromAnnotations(
      state.annotations(), state.num_models(), state.dataset().baseline());
  std::vector<double> start(warm_start.begin(), warm_start.end());
  if (start.empty()) start = FitBradleyTerry(record, regularization).raw;
  const auto& pool = state.unannotated();
  std::vector<double> scores(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    scores[i] = ExpectedBtEntropy(record, state.panel(), pool[i],
                                  regularization, start);
  }
  return pool[ArgminFirst(scores)];
}

OutcomeDistribution OutcomeDistributionFor(const WeakJudgePanel& panel,
                                           QueryIndex q) {
  const std::size_t m = panel.num_models();
  const int z = panel.judges();
  long wins = 0, losses = 0, draws = 0;
  for (int k = 1; k <= z; ++k) {
    for (ModelIndex j = 0; j < m; ++j) {
      if (j == panel.baseline()) continue;
      switch (panel.Decision(q, j, k)) {
        case Outcome::kWin:
          ++wins;
          break;
        case Outcome::kLoss:
          ++losses;
          break;
        case Outcome::kDraw:
          ++draws;
          break;
      }
    }
  }
  OutcomeDistribution pi;
  const long total = wins + losses + draws;
  if (total == 0) {
    // Only the baseline: nothing to compare, treat as a certain draw.
    pi.draw = 1.0;
    return pi;
  }
  pi.win = static_cast<double>(wins) / static_cast<double>(total);
  pi.loss = static_cast<double>(losses) / static_cast<double>(total);
  pi.draw = static_cast<double>(draws) / static_cast<double>(total);
  return pi;
}

double OutcomeDistributionEntropy(const OutcomeDistribution& pi) {
  const double p[] = {pi.win, pi.loss, pi.draw};
  return Entropy(p);
}

int EnsembleDrawCount(const WeakJudgePanel& panel, QueryIndex q) {
  int count = 0;
  for (ModelIndex j = 0; j < panel.num_models(); ++j) {
    if (j == panel.baseline()) continue;
    if (panel.Ensemble(q, j) == Outcome::kDraw) ++count;
  }
  return count;
}

namespace {

template <typename ScoreFn>
std::vector<double> PoolScores(const SelectionState& state, ScoreFn&& fn) {
  const auto& pool = state.unannotated();
  std::vector<double> scores(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) scores[i] = fn(pool[i]);
  return scores;
}

double PiEntropy(const WeakJudgePanel& panel, QueryIndex q) {
  return OutcomeDistributionEntropy(OutcomeDistributionFor(panel, q));
}

}  // namespace

QueryIndex SelectNextUncertainty(const SelectionState& state) {
  RequireNonEmpty(state);
  auto scores = PoolScores(
      state, [&](QueryIndex q) { return PiEntropy(state.panel(), q); });
  return state.unannotated()[ArgmaxFirst(scores)];
}

QueryIndex SelectNextConfidence(const SelectionState& state) {
  RequireNonEmpty(state);
  auto scores = PoolScores(
      state, [&](QueryIndex q) { return PiEntropy(state.panel(), q); });
  return state.unannotated()[ArgminFirst(scores)];
}

QueryIndex SelectNextMostDraws(const SelectionState& state) {
  RequireNonEmpty(state);
  auto scores = PoolScores(state, [&](QueryIndex q) {
    return static_cast<double>(EnsembleDrawCount(state.panel(), q));
  });
  return state.unannotated()[ArgmaxFirst(scores)];
}

namespace {

class LlmSelectorStrategy : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::kLlmSelector; }
  QueryIndex SelectNext(SelectionState& state) override {
    return SelectNextLlmSelector(state);
  }
};

class RandomStrategy : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::kRandom; }
  QueryIndex SelectNext(SelectionState& state) override {
    return SelectNextRandom(state);
  }
};

class BradleyTerryStrategy : public Strategy {
 public:
  explicit BradleyTerryStrategy(double regularization)
      : regularization_(regularization) {}
  StrategyKind kind() const override { return StrategyKind::kBradleyTerry; }
  QueryIndex SelectNext(SelectionState& state) override {
    return SelectNextBradleyTerry(state, regularization_);
  }

 private:
  double regularization_;
};

// Non-adaptive: scores depend only on the panel, so they are cached per
// query and the argmax/argmin is taken over the remaining pool.
class RankedStrategy : public Strategy {
 public:
  explicit RankedStrategy(StrategyKind kind) : kind_(kind) {}
  StrategyKind kind() const override { return kind_; }

  QueryIndex SelectNext(SelectionState& state) override {
    RequireNonEmpty(state);
    const auto& pool = state.unannotated();
    if (cache_.size() != state.dataset().num_queries()) {
      cache_.assign(state.dataset().num_queries(),
                    std::numeric_limits<double>::quiet_NaN());
    }
    std::vector<double> scores(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      double& s = cache_[pool[i]];
      if (std::isnan(s)) s = Score(state.panel(), pool[i]);
      scores[i] = s;
    }
    const std::size_t pick = kind_ == StrategyKind::kConfidence
                                 ? ArgminFirst(scores)
                                 : ArgmaxFirst(scores);
    return pool[pick];
  }

 private:
  double Score(const WeakJudgePanel& panel, QueryIndex q) const {
    if (kind_ == StrategyKind::kMostDraws) {
      return static_cast<double>(EnsembleDrawCount(panel, q));
    }
    return PiEntropy(panel, q);
  }

  StrategyKind kind_;
  std::vector<double> cache_;
};

}  // namespace

std::unique_ptr<Strategy> MakeStrategy(StrategyKind kind,
                                       const StrategyOptions& options) {
  switch (kind) {
    case StrategyKind::kLlmSelector:
      return std::make_unique<LlmSelectorStrategy>();
    case StrategyKind::kRandom:
      return std::make_unique<RandomStrategy>();
    case StrategyKind::kBradleyTerry:
      return std::make_unique<BradleyTerryStrategy>(
          options.bt_regularization);
    case StrategyKind::kMostDraws:
    case StrategyKind::kUncertainty:
    case StrategyKind::kConfidence:
      return std::make_unique<RankedStrategy>(kind);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown strategy");
}

ReplayOracle::ReplayOracle(const Dataset& dataset) : dataset_(&dataset) {
  if (!dataset.has_oracle()) {
    throw Error(ErrorKind::kFailedPrecondition,
                "replay oracle needs a dataset with oracle judgments");
  }
}

JudgmentVector ReplayOracle::Judge(QueryIndex q) {
  return dataset_->OracleVector(q);
}

QueryIndex Step(SelectionState& state, Strategy& strategy,
                JudgmentSource& oracle) {
  if (state.exhausted()) {
    throw Error(ErrorKind::kFailedPrecondition, "budget exhausted");
  }
  const QueryIndex q = strategy.SelectNext(state);
  state.Record(q, oracle.Judge(q));
  return q;
}

}  // namespace actsel
