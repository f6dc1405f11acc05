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

#include "actsel/core.h"

#include <cmath>
#include <utility>

#include "actsel/error.h"

namespace actsel {

double OutcomeScore(Outcome outcome) {
  switch (outcome) {
    case Outcome::kWin:
      return 1.0;
    case Outcome::kDraw:
      return 0.5;
    case Outcome::kLoss:
      return 0.0;
  }
  return 0.0;
}

Outcome Flip(Outcome outcome) {
  switch (outcome) {
    case Outcome::kWin:
      return Outcome::kLoss;
    case Outcome::kLoss:
      return Outcome::kWin;
    case Outcome::kDraw:
      return Outcome::kDraw;
  }
  return outcome;
}

std::string_view OutcomeSymbol(Outcome outcome) {
  switch (outcome) {
    case Outcome::kWin:
      return "win";
    case Outcome::kDraw:
      return "draw";
    case Outcome::kLoss:
      return "loss";
  }
  return "draw";
}

std::optional<Outcome> ParseOutcomeSymbol(std::string_view symbol) {
  if (symbol == "win") return Outcome::kWin;
  if (symbol == "draw") return Outcome::kDraw;
  if (symbol == "loss") return Outcome::kLoss;
  return std::nullopt;
}

char OutcomeCode(Outcome outcome) {
  switch (outcome) {
    case Outcome::kWin:
      return 'W';
    case Outcome::kDraw:
      return 'D';
    case Outcome::kLoss:
      return 'L';
  }
  return 'D';
}

std::optional<Outcome> ParseOutcomeCode(char code) {
  switch (code) {
    case 'W':
      return Outcome::kWin;
    case 'D':
      return Outcome::kDraw;
    case 'L':
      return Outcome::kLoss;
    default:
      return std::nullopt;
  }
}

double WinRate(std::span<const Outcome> outcomes) {
  if (outcomes.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no judgments");
  }
  long half_points = 0;
  for (Outcome o : outcomes) half_points += OutcomeHalfPoints(o);
  return static_cast<double>(half_points) /
         (2.0 * static_cast<double>(outcomes.size()));
}

std::string JoinTurns(std::span<const std::string> turns) {
  std::string joined;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (i > 0) joined += kTurnSeparator;
    joined += turns[i];
  }
  return joined;
}

Dataset::Dataset(std::vector<Query> queries,
                 std::vector<std::string> model_ids, std::string baseline_id,
                 std::vector<std::vector<std::string>> responses,
                 std::optional<std::vector<JudgmentVector>> oracle)
    : queries_(std::move(queries)),
      model_ids_(std::move(model_ids)),
      responses_(std::move(responses)),
      oracle_(std::move(oracle)) {
  if (model_ids_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "dataset has no models");
  }
  for (ModelIndex j = 0; j < model_ids_.size(); ++j) {
    if (!model_index_.emplace(model_ids_[j], j).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate model id: " + model_ids_[j]);
    }
  }
  auto base = model_index_.find(baseline_id);
  if (base == model_index_.end()) {
    throw Error(ErrorKind::kInvalidArgument,
                "baseline '" + baseline_id + "' is not one of the models");
  }
  baseline_ = base->second;
  if (responses_.size() != queries_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "responses do not cover every query");
  }
  for (QueryIndex q = 0; q < queries_.size(); ++q) {
    query_index_.emplace(queries_[q].id, q);
    if (responses_[q].size() != model_ids_.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "responses for query " + queries_[q].id +
                      " do not cover every model");
    }
  }
  if (oracle_) {
    if (oracle_->size() != queries_.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "oracle judgments do not cover every query");
    }
    for (QueryIndex q = 0; q < queries_.size(); ++q) {
      const JudgmentVector& v = (*oracle_)[q];
      if (v.query_id != queries_[q].id ||
          v.outcomes.size() != model_ids_.size()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "oracle judgment for query " + queries_[q].id +
                        " is misaligned");
      }
    }
  }
}

JudgmentVector Dataset::OracleVector(QueryIndex q) const {
  if (!oracle_) {
    throw Error(ErrorKind::kFailedPrecondition,
                "dataset has no oracle judgments");
  }
  JudgmentVector v = oracle_->at(q);
  v.outcomes[baseline_] = Outcome::kDraw;
  return v;
}

std::optional<QueryIndex> Dataset::FindQuery(std::string_view id) const {
  auto it = query_index_.find(std::string(id));
  if (it == query_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ModelIndex> Dataset::FindModel(std::string_view id) const {
  auto it = model_index_.find(std::string(id));
  if (it == model_index_.end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::WithBaseline(const std::string& baseline_id) const {
  return Dataset(queries_, model_ids_, baseline_id, responses_, oracle_);
}

Dataset Dataset::WithoutOracle() const {
  return Dataset(queries_, model_ids_, baseline_id(), responses_,
                 std::nullopt);
}

void AnnotationSet::Append(JudgmentVector vector) {
  if (!ids_.insert(vector.query_id).second) {
    throw Error(ErrorKind::kConflict,
                "query already annotated: " + vector.query_id);
  }
  vectors_.push_back(std::move(vector));
}

bool AnnotationSet::Contains(std::string_view query_id) const {
  return ids_.count(std::string(query_id)) > 0;
}

NoiseParams::NoiseParams(double eps_loss, double eps_draw)
    : eps_loss_(eps_loss), eps_draw_(eps_draw) {
  auto interior = [](double p) { return p > 0.0 && p < 1.0; };
  if (!interior(eps_loss) || !interior(eps_draw) ||
      !(eps_loss + eps_draw < 1.0)) {
    throw Error(ErrorKind::kValidation,
                "noise parameters must satisfy 0 < eps_loss, eps_draw and "
                "eps_loss + eps_draw < 1");
  }
  log_factor_[static_cast<int>(Outcome::kLoss)] = std::log(eps_loss_);
  log_factor_[static_cast<int>(Outcome::kDraw)] = std::log(eps_draw_);
  log_factor_[static_cast<int>(Outcome::kWin)] = std::log(eps_win());
}

double NoiseParams::Factor(Outcome outcome) const {
  switch (outcome) {
    case Outcome::kLoss:
      return eps_loss_;
    case Outcome::kDraw:
      return eps_draw_;
    case Outcome::kWin:
      return eps_win();
  }
  return eps_draw_;
}

std::vector<double> AnnotatedWinRates(const AnnotationSet& annotations,
                                      std::size_t num_models,
                                      ModelIndex baseline) {
  if (annotations.empty()) {
    throw Error(ErrorKind::kFailedPrecondition, "annotation set is empty");
  }
  std::vector<long> half_points(num_models, 0);
  for (const JudgmentVector& v : annotations.vectors()) {
    if (v.outcomes.size() != num_models) {
      throw Error(ErrorKind::kInvalidArgument,
                  "judgment vector for " + v.query_id +
                      " does not cover every model");
    }
    for (ModelIndex j = 0; j < num_models; ++j) {
      half_points[j] += OutcomeHalfPoints(v.outcomes[j]);
    }
  }
  const double denom = 2.0 * static_cast<double>(annotations.size());
  std::vector<double> rates(num_models);
  for (ModelIndex j = 0; j < num_models; ++j) {
    rates[j] = static_cast<double>(half_points[j]) / denom;
  }
  if (baseline < num_models) rates[baseline] = 0.5;
  return rates;
}

ModelIndex ArgmaxWithTiebreak(std::span<const double> values,
                              std::span<const double> tiebreak) {
  ModelIndex best = 0;
  for (ModelIndex j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) {
      best = j;
    } else if (values[j] == values[best] && !tiebreak.empty() &&
               tiebreak[j] > tiebreak[best]) {
      best = j;
    }
  }
  return best;
}

ModelIndex SelectFinalModel(const AnnotationSet& annotations,
                            std::span<const double> posterior_probabilities,
                            ModelIndex baseline) {
  if (annotations.empty()) {
    throw Error(ErrorKind::kFailedPrecondition, "annotation set is empty");
  }
  const std::size_t m = annotations.vectors().front().outcomes.size();
  std::vector<double> rates = AnnotatedWinRates(annotations, m, baseline);
  if (!posterior_probabilities.empty() &&
      posterior_probabilities.size() != m) {
    throw Error(ErrorKind::kInvalidArgument,
                "posterior size does not match model count");
  }
  return ArgmaxWithTiebreak(rates, posterior_probabilities);
}

}  // namespace actsel
