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

// Weak judges: per-query k-gram language models fit on every candidate
// response, average-likelihood scoring, and the thresholded ensemble used as
// a zero-cost noisy oracle.

#ifndef ACTSEL_NGRAM_H_
#define ACTSEL_NGRAM_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "actsel/core.h"

namespace actsel {

inline constexpr int kDefaultJudgeCount = 10;
inline constexpr double kLikelihoodDrawTolerance = 1e-12;

// Splits on runs of whitespace; tokens are kept verbatim.
std::vector<std::string> Tokenize(std::string_view text);

// Maximum-likelihood k-gram model over a small corpus. Positions closer to
// the start of a sequence than k-1 tokens condition on the shorter available
// prefix, so the first token of every sequence is scored by unigram
// frequency. No smoothing: scored sequences are expected to be in-corpus.
class KGramModel {
 public:
  static KGramModel Fit(std::span<const std::vector<std::string>> corpus,
                        int order);

  int order() const { return order_; }
  bool empty() const { return total_tokens_ == 0; }

  // P(token | context), where context holds at most order-1 tokens. Returns 0
  // for unseen events.
  double Probability(std::span<const std::string> context,
                     std::string_view token) const;

  // Mean of the per-position conditional probabilities at the given order
  // (1 <= order <= this->order()). Empty sequences score 0. Throws
  // Error(kInvalidArgument, "response not in fitted corpus") on an unseen
  // event.
  double AverageLikelihood(std::span<const std::string> tokens,
                           int order) const;
  double AverageLikelihood(std::span<const std::string> tokens) const {
    return AverageLikelihood(tokens, order_);
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& key) const;
  };
  using CountMap =
      std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, KeyHash>;

  bool Encode(std::span<const std::string> tokens,
              std::vector<std::uint32_t>* ids) const;

  int order_ = 1;
  std::size_t total_tokens_ = 0;
  std::unordered_map<std::string, std::uint32_t> vocabulary_;
  // Occurrences of each context that is followed by a token.
  CountMap context_counts_;
  // Occurrences of each context + token event.
  CountMap event_counts_;
};

// Weak judge decision from the two average likelihoods.
Outcome CompareLikelihoods(double candidate, double baseline);

// Average likelihood of every response under its query's k-gram model, for
// every order k = 1..max_order. Independent of the baseline choice.
class LikelihoodTable {
 public:
  // threads == 0 uses the hardware concurrency.
  static LikelihoodTable Build(const Dataset& dataset, int max_order,
                               unsigned threads = 0);

  std::size_t num_queries() const { return num_queries_; }
  std::size_t num_models() const { return num_models_; }
  int max_order() const { return max_order_; }

  // order is 1-based.
  double at(QueryIndex q, ModelIndex j, int order) const {
    return values_[(q * num_models_ + j) * max_order_ + (order - 1)];
  }

 private:
  std::size_t num_queries_ = 0;
  std::size_t num_models_ = 0;
  int max_order_ = 0;
  std::vector<double> values_;
};

// nu = mean half-point score over the judges' decisions.
double EnsembleNu(std::span<const Outcome> decisions);

// Thresholded ensemble: Win if nu >= 2/3, Draw if 1/3 <= nu < 2/3, else
// Loss. Evaluated in exact integer arithmetic.
Outcome EnsembleOutcome(std::span<const Outcome> decisions);

// Decisions of z weak judges (orders 1..z) for every (query, model) against
// a fixed baseline. Immutable once built.
class WeakJudgePanel {
 public:
  WeakJudgePanel() = default;

  static WeakJudgePanel Build(const LikelihoodTable& table,
                              ModelIndex baseline, int judges);

  // decisions[(q * judges + (k - 1)) * num_models + j]. The baseline's own
  // decisions are forced to Draw.
  static WeakJudgePanel FromDecisions(std::size_t num_queries,
                                      std::size_t num_models,
                                      ModelIndex baseline, int judges,
                                      std::vector<Outcome> decisions);

  std::size_t num_queries() const { return num_queries_; }
  std::size_t num_models() const { return num_models_; }
  ModelIndex baseline() const { return baseline_; }
  int judges() const { return judges_; }

  // judge is 1-based.
  Outcome Decision(QueryIndex q, ModelIndex j, int judge) const {
    return decisions_[Offset(q, judge) + j];
  }
  // Judge `judge`'s decisions for every model on query q.
  std::span<const Outcome> JudgeVector(QueryIndex q, int judge) const {
    return {decisions_.data() + Offset(q, judge), num_models_};
  }
  std::vector<Outcome> ModelDecisions(QueryIndex q, ModelIndex j) const;

  double Nu(QueryIndex q, ModelIndex j) const;
  Outcome Ensemble(QueryIndex q, ModelIndex j) const;
  double EnsembleScore(QueryIndex q, ModelIndex j) const {
    return OutcomeScore(Ensemble(q, j));
  }

  const std::vector<Outcome>& decisions() const { return decisions_; }

 private:
  std::size_t Offset(QueryIndex q, int judge) const {
    return (q * static_cast<std::size_t>(judges_) +
            static_cast<std::size_t>(judge - 1)) *
           num_models_;
  }

  std::size_t num_queries_ = 0;
  std::size_t num_models_ = 0;
  ModelIndex baseline_ = 0;
  int judges_ = 0;
  std::vector<Outcome> decisions_;
};

// Convenience: likelihood table + panel for the dataset's baseline.
WeakJudgePanel BuildPanel(const Dataset& dataset,
                          int judges = kDefaultJudgeCount,
                          unsigned threads = 0);

// FNV-1a over query ids, texts, model ids, baseline and responses. Oracle
// judgments are excluded because panels never depend on them.
std::uint64_t DatasetContentHash(const Dataset& dataset);

// Line-delimited panel cache. The header line records the content hash; a
// stale or foreign cache is rejected with Error(kFailedPrecondition).
void SavePanelCache(const std::filesystem::path& path, const Dataset& dataset,
                    const WeakJudgePanel& panel);
WeakJudgePanel LoadPanelCache(const std::filesystem::path& path,
                              const Dataset& dataset);

}  // namespace actsel

#endif  // ACTSEL_NGRAM_H_
