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

// Query-acquisition policies behind one interface: the expected-entropy
// selector driven by weak-judge hypotheticals, plus the Random, Bradley-Terry,
// Most Draws, Uncertainty and Confidence baselines.

#ifndef ACTSEL_STRATEGIES_H_
#define ACTSEL_STRATEGIES_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "actsel/bradley_terry.h"
#include "actsel/core.h"
#include "actsel/ngram.h"
#include "actsel/posterior.h"
#include "actsel/rng.h"

namespace actsel {

enum class StrategyKind {
  kLlmSelector,
  kRandom,
  kBradleyTerry,
  kMostDraws,
  kUncertainty,
  kConfidence,
};

inline constexpr StrategyKind kAllStrategyKinds[] = {
    StrategyKind::kLlmSelector, StrategyKind::kRandom,
    StrategyKind::kBradleyTerry, StrategyKind::kMostDraws,
    StrategyKind::kUncertainty, StrategyKind::kConfidence,
};

// Configuration names: llm-selector | random | bradley-terry | most-draws |
// uncertainty | confidence.
std::string_view StrategyName(StrategyKind kind);
std::optional<StrategyKind> ParseStrategyKind(std::string_view name);

// Selection scores closer than this are treated as tied; ties always go to
// the earliest query in pool order.
inline constexpr double kScoreTieTolerance = 1e-12;

// Position of the smallest (largest) score, first position on ties.
std::size_t ArgminFirst(std::span<const double> scores);
std::size_t ArgmaxFirst(std::span<const double> scores);

// Mutable bookkeeping of one selection run: pool, unannotated queries in pool
// order, annotations, posterior and the run's RNG.
class SelectionState {
 public:
  // `pool` holds dataset query indices and is kept in the given order.
  SelectionState(const Dataset& dataset, const WeakJudgePanel& panel,
                 std::vector<QueryIndex> pool, NoiseParams params,
                 std::size_t budget, std::uint64_t seed);

  const Dataset& dataset() const { return *dataset_; }
  const WeakJudgePanel& panel() const { return *panel_; }
  const std::vector<QueryIndex>& pool() const { return pool_; }
  const std::vector<QueryIndex>& unannotated() const { return unannotated_; }
  const AnnotationSet& annotations() const { return annotations_; }
  const std::vector<QueryIndex>& annotation_order() const { return order_; }
  const Posterior& posterior() const { return posterior_; }
  const NoiseParams& params() const { return params_; }
  std::size_t budget() const { return budget_; }
  std::size_t t() const { return annotations_.size(); }
  bool exhausted() const { return t() >= budget_; }
  std::size_t num_models() const { return dataset_->num_models(); }
  Rng& rng() { return rng_; }

  // Appends the judgment for q, removes q from the unannotated pool and
  // updates the posterior. Throws Error(kFailedPrecondition) when the budget
  // is exhausted or q is not pending annotation, and Error(kValidation) when
  // the vector does not cover every model.
  void Record(QueryIndex q, JudgmentVector vector);

  // select_final_model on the current annotations.
  ModelIndex FinalModel() const;

 private:
  const Dataset* dataset_;
  const WeakJudgePanel* panel_;
  std::vector<QueryIndex> pool_;
  std::vector<QueryIndex> unannotated_;
  std::vector<QueryIndex> order_;
  AnnotationSet annotations_;
  Posterior posterior_;
  NoiseParams params_;
  std::size_t budget_;
  Rng rng_;
};

// Mean over judges of the entropy after each judge's hypothetical update.
double ExpectedHypotheticalEntropy(const Posterior& posterior,
                                   const WeakJudgePanel& panel, QueryIndex q,
                                   const NoiseParams& params);

// Each select function returns a dataset query index from the unannotated
// pool and throws Error(kFailedPrecondition, "budget exceeds pool") when the
// pool is empty.
QueryIndex SelectNextLlmSelector(const SelectionState& state);
QueryIndex SelectNextRandom(SelectionState& state);

// Mean over judges of the entropy of normalized BT strengths refit on the
// current record plus judge k's vector for q.
double ExpectedBtEntropy(const BaselineRecord& record,
                         const WeakJudgePanel& panel, QueryIndex q,
                         double regularization,
                         std::span<const double> warm_start = {});
QueryIndex SelectNextBradleyTerry(const SelectionState& state,
                                  double regularization,
                                  std::span<const double> warm_start = {});

// Fractions of (win, loss, draw) over the candidates' raw weak-judge
// decisions on q. The baseline's self-draw is excluded.
struct OutcomeDistribution {
  double win = 0.0;
  double loss = 0.0;
  double draw = 0.0;
};
OutcomeDistribution OutcomeDistributionFor(const WeakJudgePanel& panel,
                                           QueryIndex q);
double OutcomeDistributionEntropy(const OutcomeDistribution& pi);

// Candidates whose thresholded ensemble outcome on q is Draw.
int EnsembleDrawCount(const WeakJudgePanel& panel, QueryIndex q);

QueryIndex SelectNextUncertainty(const SelectionState& state);
QueryIndex SelectNextConfidence(const SelectionState& state);
QueryIndex SelectNextMostDraws(const SelectionState& state);

struct StrategyOptions {
  double bt_regularization = kDefaultBtRegularization;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual StrategyKind kind() const = 0;
  virtual QueryIndex SelectNext(SelectionState& state) = 0;
};

std::unique_ptr<Strategy> MakeStrategy(StrategyKind kind,
                                       const StrategyOptions& options = {});

// Where judgments come from during a run.
class JudgmentSource {
 public:
  virtual ~JudgmentSource() = default;
  virtual JudgmentVector Judge(QueryIndex q) = 0;
};

// Looks judgments up in the dataset's oracle.
class ReplayOracle : public JudgmentSource {
 public:
  explicit ReplayOracle(const Dataset& dataset);
  JudgmentVector Judge(QueryIndex q) override;

 private:
  const Dataset* dataset_;
};

// One acquisition: select, judge, record. Returns the annotated query.
QueryIndex Step(SelectionState& state, Strategy& strategy,
                JudgmentSource& oracle);

}  // namespace actsel

#endif  // ACTSEL_STRATEGIES_H_
