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

// Domain types shared by every module: outcomes, judgment vectors, datasets,
// annotation sets, noise parameters, and win-rate arithmetic.

#ifndef ACTSEL_CORE_H_
#define ACTSEL_CORE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace actsel {

using QueryIndex = std::size_t;
using ModelIndex = std::size_t;

// Candidate-vs-baseline result, always from the candidate's perspective.
enum class Outcome : std::uint8_t { kLoss = 0, kDraw = 1, kWin = 2 };

inline constexpr Outcome kAllOutcomes[] = {Outcome::kWin, Outcome::kDraw,
                                           Outcome::kLoss};

// Win -> 1, Draw -> 0.5, Loss -> 0.
double OutcomeScore(Outcome outcome);

// Twice the score, as an integer (Win -> 2, Draw -> 1, Loss -> 0).
inline int OutcomeHalfPoints(Outcome outcome) {
  return static_cast<int>(outcome);
}

// Swaps Win and Loss.
Outcome Flip(Outcome outcome);

// Wire symbols: exactly "win", "draw", "loss".
std::string_view OutcomeSymbol(Outcome outcome);
std::optional<Outcome> ParseOutcomeSymbol(std::string_view symbol);

// Single-character codes used by the panel cache: 'W', 'D', 'L'.
char OutcomeCode(Outcome outcome);
std::optional<Outcome> ParseOutcomeCode(char code);

// Mean outcome score. Throws Error(kInvalidArgument, "no judgments") when
// the list is empty.
double WinRate(std::span<const Outcome> outcomes);

// Separator used to flatten multi-turn dialogues into one query text.
inline constexpr std::string_view kTurnSeparator = "\n\n[TURN]\n\n";

std::string JoinTurns(std::span<const std::string> turns);

struct Query {
  std::string id;
  std::string text;

  friend bool operator==(const Query&, const Query&) = default;
};

// The oracle's outcome for every model on one query. `outcomes` is indexed
// by model position in the owning dataset.
struct JudgmentVector {
  std::string query_id;
  std::vector<Outcome> outcomes;

  friend bool operator==(const JudgmentVector&,
                         const JudgmentVector&) = default;
};

// Queries, models and per-(query, model) responses, with an optional replay
// oracle. Structural invariants are checked at construction; content checks
// (duplicate ids, empty texts) are reported by ValidateDataset.
class Dataset {
 public:
  Dataset(std::vector<Query> queries, std::vector<std::string> model_ids,
          std::string baseline_id,
          std::vector<std::vector<std::string>> responses,
          std::optional<std::vector<JudgmentVector>> oracle = std::nullopt);

  std::size_t num_queries() const { return queries_.size(); }
  std::size_t num_models() const { return model_ids_.size(); }

  const std::vector<Query>& queries() const { return queries_; }
  const Query& query(QueryIndex q) const { return queries_.at(q); }
  const std::vector<std::string>& model_ids() const { return model_ids_; }
  const std::string& model_id(ModelIndex j) const { return model_ids_.at(j); }
  const std::string& baseline_id() const { return model_ids_[baseline_]; }
  ModelIndex baseline() const { return baseline_; }

  const std::string& response(QueryIndex q, ModelIndex j) const {
    return responses_.at(q).at(j);
  }
  const std::vector<std::vector<std::string>>& responses() const {
    return responses_;
  }

  bool has_oracle() const { return oracle_.has_value(); }
  const std::optional<std::vector<JudgmentVector>>& oracle() const {
    return oracle_;
  }
  // Replay judgment for query q with the baseline entry forced to Draw.
  // Throws Error(kFailedPrecondition) when the dataset has no oracle.
  JudgmentVector OracleVector(QueryIndex q) const;

  // First occurrence wins when ids are duplicated.
  std::optional<QueryIndex> FindQuery(std::string_view id) const;
  std::optional<ModelIndex> FindModel(std::string_view id) const;

  Dataset WithBaseline(const std::string& baseline_id) const;
  Dataset WithoutOracle() const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.queries_ == b.queries_ && a.model_ids_ == b.model_ids_ &&
           a.baseline_ == b.baseline_ && a.responses_ == b.responses_ &&
           a.oracle_ == b.oracle_;
  }

 private:
  std::vector<Query> queries_;
  std::vector<std::string> model_ids_;
  ModelIndex baseline_ = 0;
  std::vector<std::vector<std::string>> responses_;
  std::optional<std::vector<JudgmentVector>> oracle_;
  std::unordered_map<std::string, QueryIndex> query_index_;
  std::unordered_map<std::string, ModelIndex> model_index_;
};

// Annotated judgment vectors in acquisition order.
class AnnotationSet {
 public:
  // Throws Error(kConflict) if the query was already annotated.
  void Append(JudgmentVector vector);

  bool Contains(std::string_view query_id) const;
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }
  const std::vector<JudgmentVector>& vectors() const { return vectors_; }

 private:
  std::vector<JudgmentVector> vectors_;
  std::unordered_set<std::string> ids_;
};

// Likelihood of the best model losing / drawing / winning against the
// baseline on a random query. All three probabilities are strictly positive.
class NoiseParams {
 public:
  // Throws Error(kValidation) unless eps_loss, eps_draw are in (0, 1) and
  // eps_loss + eps_draw < 1.
  NoiseParams(double eps_loss, double eps_draw);

  double eps_loss() const { return eps_loss_; }
  double eps_draw() const { return eps_draw_; }
  double eps_win() const { return 1.0 - eps_loss_ - eps_draw_; }

  double Factor(Outcome outcome) const;
  double LogFactor(Outcome outcome) const {
    return log_factor_[static_cast<int>(outcome)];
  }

 private:
  double eps_loss_;
  double eps_draw_;
  double log_factor_[3];
};

// Per-model win rate over the annotation set. The baseline is pinned at 0.5.
std::vector<double> AnnotatedWinRates(const AnnotationSet& annotations,
                                      std::size_t num_models,
                                      ModelIndex baseline);

// Index of the highest value; ties go to the higher tiebreak value, then to
// the smaller index. `tiebreak` may be empty.
ModelIndex ArgmaxWithTiebreak(std::span<const double> values,
                              std::span<const double> tiebreak = {});

// Argmax of the annotated win rates, ties broken by posterior probability and
// then by model index. Throws Error(kFailedPrecondition) on an empty set.
ModelIndex SelectFinalModel(const AnnotationSet& annotations,
                            std::span<const double> posterior_probabilities,
                            ModelIndex baseline);

}  // namespace actsel

#endif  // ACTSEL_CORE_H_
