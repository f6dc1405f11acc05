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

#include "actsel/ngram.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "actsel/dataset_io.h"
#include "actsel/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace actsel {
namespace {

using testing::Codes;
using testing::DataPath;
using Tokens = std::vector<std::string>;

// Reference k-gram scorer written from the definition: at position i the
// context is the (at most k-1) preceding tokens of the same sequence, and
// P(token | context) = #(context, token) / #(context followed by anything),
// counted over every position of every corpus sequence.
double ReferenceAverageLikelihood(const std::vector<Tokens>& corpus,
                                  const Tokens& tokens, int k) {
  if (tokens.empty()) return 0.0;
  auto count = [&](const Tokens& pattern, bool followed) {
    long n = 0;
    for (const Tokens& s : corpus) {
      const std::size_t need = pattern.size() + (followed ? 1 : 0);
      if (s.size() < need) continue;
      for (std::size_t i = 0; i + need <= s.size(); ++i) {
        bool match = true;
        for (std::size_t t = 0; t < pattern.size(); ++t) {
          if (s[i + t] != pattern[t]) match = false;
        }
        n += match;
      }
    }
    return n;
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::size_t c = std::min<std::size_t>(i, k - 1);
    Tokens context(tokens.begin() + (i - c), tokens.begin() + i);
    Tokens event = context;
    event.push_back(tokens[i]);
    sum += static_cast<double>(count(event, false)) /
           static_cast<double>(count(context, true));
  }
  return sum / static_cast<double>(tokens.size());
}

TEST(TokenizeTest, WhitespaceRunsAndVerbatimTokens) {
  EXPECT_EQ(Tokenize("  The cat,\tsat\n\nON  "),
            (Tokens{"The", "cat,", "sat", "ON"}));
  EXPECT_TRUE(Tokenize("").empty());
  EXPECT_TRUE(Tokenize(" \t\n").empty());
}

TEST(KGramModelTest, UnigramProbabilities) {
  std::vector<Tokens> corpus{{"a", "a"}, {"a", "b"}};
  KGramModel model = KGramModel::Fit(corpus, 1);
  EXPECT_NEAR(model.Probability({}, "a"), 3.0 / 4.0, 1e-12);
  EXPECT_NEAR(model.Probability({}, "b"), 1.0 / 4.0, 1e-12);
  EXPECT_EQ(model.Probability({}, "c"), 0.0);
  EXPECT_NEAR(model.AverageLikelihood(Tokens{"a", "b"}), 0.5, 1e-12);
}

TEST(KGramModelTest, BigramWithStartTruncation) {
  std::vector<Tokens> corpus{{"the", "cat", "sat"}};
  KGramModel model = KGramModel::Fit(corpus, 2);
  EXPECT_NEAR(model.AverageLikelihood(corpus[0]), 7.0 / 9.0, 1e-12);
  EXPECT_NEAR(model.AverageLikelihood(corpus[0], 1), 1.0 / 3.0, 1e-12);
}

TEST(KGramModelTest, EmptySequenceScoresZero) {
  std::vector<Tokens> corpus{{"a"}, {}};
  KGramModel model = KGramModel::Fit(corpus, 3);
  EXPECT_EQ(model.AverageLikelihood(Tokens{}), 0.0);
  KGramModel nothing = KGramModel::Fit(std::vector<Tokens>{{}, {}}, 2);
  EXPECT_TRUE(nothing.empty());
  EXPECT_EQ(nothing.AverageLikelihood(Tokens{}), 0.0);
}

TEST(KGramModelTest, UnseenEventThrows) {
  std::vector<Tokens> corpus{{"a", "b"}};
  KGramModel model = KGramModel::Fit(corpus, 2);
  EXPECT_ERROR_KIND(model.AverageLikelihood(Tokens{"b", "a"}),
                    ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(model.AverageLikelihood(Tokens{"z"}),
                    ErrorKind::kInvalidArgument);
}

TEST(KGramModelTest, BadOrdersThrow) {
  std::vector<Tokens> corpus{{"a", "b"}};
  EXPECT_ERROR_KIND(KGramModel::Fit(corpus, 0), ErrorKind::kInvalidArgument);
  KGramModel model = KGramModel::Fit(corpus, 2);
  EXPECT_ERROR_KIND(model.AverageLikelihood(corpus[0], 3),
                    ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(model.AverageLikelihood(corpus[0], 0),
                    ErrorKind::kInvalidArgument);
}

TEST(KGramModelTest, MatchesReferenceOnRandomCorpora) {
  std::mt19937 rng(17);
  const std::vector<std::string> vocab{"a", "b", "c", "d"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Tokens> corpus(1 + rng() % 5);
    for (Tokens& s : corpus) {
      s.resize(rng() % 9);
      for (auto& t : s) t = vocab[rng() % vocab.size()];
    }
    const int order = 1 + static_cast<int>(rng() % 5);
    KGramModel model = KGramModel::Fit(corpus, order);
    for (const Tokens& s : corpus) {
      for (int k = 1; k <= order; ++k) {
        EXPECT_NEAR(model.AverageLikelihood(s, k),
                    ReferenceAverageLikelihood(corpus, s, k), 1e-12);
      }
    }
  }
}

TEST(CompareLikelihoodsTest, ToleranceMakesDraws) {
  EXPECT_EQ(CompareLikelihoods(0.6, 0.5), Outcome::kWin);
  EXPECT_EQ(CompareLikelihoods(0.4, 0.5), Outcome::kLoss);
  EXPECT_EQ(CompareLikelihoods(0.5, 0.5), Outcome::kDraw);
  EXPECT_EQ(CompareLikelihoods(0.5 + 1e-14, 0.5), Outcome::kDraw);
  EXPECT_EQ(CompareLikelihoods(0.0, 0.0), Outcome::kDraw);
}

TEST(EnsembleTest, ThresholdBoundaries) {
  // nu = 2/3 exactly.
  EXPECT_EQ(EnsembleOutcome(Codes("WWL")), Outcome::kWin);
  EXPECT_EQ(EnsembleOutcome(Codes("WDD")), Outcome::kWin);
  // nu = 1/3 exactly.
  EXPECT_EQ(EnsembleOutcome(Codes("LDD")), Outcome::kDraw);
  EXPECT_EQ(EnsembleOutcome(Codes("WLL")), Outcome::kDraw);
  // nu = 0.3, just below 1/3.
  EXPECT_EQ(EnsembleOutcome(Codes("WWWLLLLLLL")), Outcome::kLoss);
  // nu = 0.65, just below 2/3.
  EXPECT_EQ(EnsembleOutcome(Codes("WWWWWWDLLL")), Outcome::kDraw);
  // 4 wins, 2 draws, 4 losses.
  EXPECT_EQ(EnsembleNu(Codes("WWWWDDLLLL")), 0.5);
  EXPECT_EQ(EnsembleOutcome(Codes("WWWWDDLLLL")), Outcome::kDraw);
  EXPECT_ERROR_KIND(EnsembleOutcome(std::vector<Outcome>{}),
                    ErrorKind::kInvalidArgument);
}

TEST(WeakJudgePanelTest, FromDecisionsForcesBaselineDraw) {
  // 1 query, 3 models, 2 judges; baseline 1.
  WeakJudgePanel panel =
      WeakJudgePanel::FromDecisions(1, 3, 1, 2, Codes("WWLLLW"));
  EXPECT_EQ(panel.Decision(0, 1, 1), Outcome::kDraw);
  EXPECT_EQ(panel.Decision(0, 1, 2), Outcome::kDraw);
  EXPECT_EQ(panel.Decision(0, 0, 1), Outcome::kWin);
  EXPECT_EQ(panel.Decision(0, 2, 2), Outcome::kWin);
  EXPECT_EQ(panel.ModelDecisions(0, 0), Codes("WL"));
  EXPECT_EQ(panel.Nu(0, 0), 0.5);
  EXPECT_EQ(panel.Ensemble(0, 2), Outcome::kDraw);
  auto v = panel.JudgeVector(0, 2);
  EXPECT_EQ(std::vector<Outcome>(v.begin(), v.end()), Codes("LDW"));
  EXPECT_ERROR_KIND(WeakJudgePanel::FromDecisions(1, 3, 0, 2, Codes("WWL")),
                    ErrorKind::kInvalidArgument);
}

TEST(WeakJudgePanelTest, BuildComparesAgainstBaselineAtEachOrder) {
  Dataset d = LoadDataset(DataPath("replay30.jsonl"));
  LikelihoodTable table = LikelihoodTable::Build(d, 4, 1);
  WeakJudgePanel panel = WeakJudgePanel::Build(table, d.baseline(), 4);
  for (QueryIndex q = 0; q < d.num_queries(); ++q) {
    std::vector<Tokens> corpus;
    for (ModelIndex j = 0; j < d.num_models(); ++j) {
      corpus.push_back(Tokenize(d.response(q, j)));
    }
    for (ModelIndex j = 0; j < d.num_models(); ++j) {
      for (int k = 1; k <= 4; ++k) {
        const double mine = ReferenceAverageLikelihood(corpus, corpus[j], k);
        const double base =
            ReferenceAverageLikelihood(corpus, corpus[d.baseline()], k);
        EXPECT_NEAR(table.at(q, j, k), mine, 1e-12);
        Outcome expected = Outcome::kDraw;
        if (j != d.baseline() && mine > base + 1e-9) expected = Outcome::kWin;
        if (j != d.baseline() && mine < base - 1e-9) expected = Outcome::kLoss;
        if (std::abs(mine - base) > 1e-9 || j == d.baseline()) {
          EXPECT_EQ(panel.Decision(q, j, k), expected);
        }
      }
    }
  }
}

TEST(WeakJudgePanelTest, TableDoesNotDependOnThreads) {
  Dataset d = LoadDataset(DataPath("replay30.jsonl"));
  LikelihoodTable one = LikelihoodTable::Build(d, 5, 1);
  LikelihoodTable many = LikelihoodTable::Build(d, 5, 4);
  for (QueryIndex q = 0; q < d.num_queries(); ++q) {
    for (ModelIndex j = 0; j < d.num_models(); ++j) {
      for (int k = 1; k <= 5; ++k) EXPECT_EQ(one.at(q, j, k), many.at(q, j, k));
    }
  }
}

TEST(WeakJudgePanelTest, BuildRejectsTooManyJudges) {
  Dataset d = LoadDataset(DataPath("fixture8.jsonl"));
  LikelihoodTable table = LikelihoodTable::Build(d, 2, 1);
  EXPECT_ERROR_KIND(WeakJudgePanel::Build(table, 0, 3),
                    ErrorKind::kInvalidArgument);
}

TEST(PanelCacheTest, RoundTripAndStaleness) {
  Dataset d = LoadDataset(DataPath("fixture8.jsonl"));
  WeakJudgePanel panel = BuildPanel(d, 3, 1);
  auto path = std::filesystem::temp_directory_path() / "actsel_panel_cache.jsonl";
  SavePanelCache(path, d, panel);
  WeakJudgePanel loaded = LoadPanelCache(path, d);
  EXPECT_EQ(loaded.decisions(), panel.decisions());
  EXPECT_EQ(loaded.judges(), 3);
  EXPECT_EQ(loaded.baseline(), d.baseline());

  // The oracle is not part of the content hash.
  EXPECT_EQ(DatasetContentHash(d), DatasetContentHash(d.WithoutOracle()));
  EXPECT_NO_THROW(LoadPanelCache(path, d.WithoutOracle()));

  Dataset other = d.WithBaseline(d.model_id(1));
  EXPECT_NE(DatasetContentHash(other), DatasetContentHash(d));
  EXPECT_ERROR_KIND(LoadPanelCache(path, other),
                    ErrorKind::kFailedPrecondition);
  std::filesystem::remove(path);
}

TEST(PanelCacheTest, MissingAndCorruptFiles) {
  Dataset d = LoadDataset(DataPath("fixture8.jsonl"));
  auto path = std::filesystem::temp_directory_path() / "actsel_corrupt.jsonl";
  std::filesystem::remove(path);
  EXPECT_ERROR_KIND(LoadPanelCache(path, d), ErrorKind::kNotFound);
  {
    std::ofstream out(path);
    out << "{not json\n";
  }
  EXPECT_ERROR_KIND(LoadPanelCache(path, d), ErrorKind::kParse);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace actsel
