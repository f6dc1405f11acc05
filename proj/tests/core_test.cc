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
#include <vector>

#include "actsel/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace actsel {
namespace {

using testing::Codes;
using testing::SmallDataset;

TEST(OutcomeTest, ScoresAndHalfPoints) {
  EXPECT_EQ(OutcomeScore(Outcome::kWin), 1.0);
  EXPECT_EQ(OutcomeScore(Outcome::kDraw), 0.5);
  EXPECT_EQ(OutcomeScore(Outcome::kLoss), 0.0);
  EXPECT_EQ(OutcomeHalfPoints(Outcome::kWin), 2);
  EXPECT_EQ(OutcomeHalfPoints(Outcome::kDraw), 1);
  EXPECT_EQ(OutcomeHalfPoints(Outcome::kLoss), 0);
}

TEST(OutcomeTest, FlipSwapsWinAndLoss) {
  EXPECT_EQ(Flip(Outcome::kWin), Outcome::kLoss);
  EXPECT_EQ(Flip(Outcome::kLoss), Outcome::kWin);
  EXPECT_EQ(Flip(Outcome::kDraw), Outcome::kDraw);
}

TEST(OutcomeTest, SymbolsRoundTrip) {
  for (Outcome o : kAllOutcomes) {
    EXPECT_EQ(ParseOutcomeSymbol(OutcomeSymbol(o)), o);
    EXPECT_EQ(ParseOutcomeCode(OutcomeCode(o)), o);
  }
  EXPECT_FALSE(ParseOutcomeSymbol("tie"));
  EXPECT_FALSE(ParseOutcomeSymbol("Win"));
  EXPECT_FALSE(ParseOutcomeCode('x'));
}

TEST(WinRateTest, MixedSequence) {
  EXPECT_DOUBLE_EQ(WinRate(Codes("WDLW")), (1 + 0.5 + 0 + 1) / 4.0);
  EXPECT_EQ(WinRate(Codes("DD")), 0.5);
}

TEST(WinRateTest, EmptyThrows) {
  EXPECT_ERROR_KIND(WinRate(std::vector<Outcome>{}),
                    ErrorKind::kInvalidArgument);
}

TEST(JoinTurnsTest, UsesSeparator) {
  std::vector<std::string> turns{"hi", "there"};
  EXPECT_EQ(JoinTurns(turns), "hi\n\n[TURN]\n\nthere");
  std::vector<std::string> one{"solo"};
  EXPECT_EQ(JoinTurns(one), "solo");
}

TEST(DatasetTest, AccessorsAndLookup) {
  Dataset d = SmallDataset(3, 4, {"DWLD", "DDDD", "DLLW"});
  EXPECT_EQ(d.num_queries(), 3u);
  EXPECT_EQ(d.num_models(), 4u);
  EXPECT_EQ(d.baseline(), 0u);
  EXPECT_EQ(d.baseline_id(), "m0");
  EXPECT_EQ(d.FindQuery("q2"), 2u);
  EXPECT_EQ(d.FindModel("m3"), 3u);
  EXPECT_FALSE(d.FindQuery("nope"));
  EXPECT_EQ(d.response(1, 2), "r 1 2");
  EXPECT_TRUE(d.has_oracle());
  EXPECT_EQ(d.OracleVector(0).outcomes, Codes("DWLD"));
}

TEST(DatasetTest, OracleVectorForcesBaselineDraw) {
  Dataset d = SmallDataset(1, 3, {"WWL"});
  EXPECT_EQ(d.OracleVector(0).outcomes, Codes("DWL"));
}

TEST(DatasetTest, WithBaselineMovesTheBaseline) {
  Dataset d = SmallDataset(2, 3, {"DWL", "DLW"}).WithBaseline("m2");
  EXPECT_EQ(d.baseline(), 2u);
  EXPECT_EQ(d.OracleVector(0).outcomes[2], Outcome::kDraw);
  EXPECT_ERROR_KIND(d.WithBaseline("zz"), ErrorKind::kInvalidArgument);
}

TEST(DatasetTest, WithoutOracleDropsJudgments) {
  Dataset d = SmallDataset(2, 3, {"DWL", "DLW"}).WithoutOracle();
  EXPECT_FALSE(d.has_oracle());
  EXPECT_ERROR_KIND(d.OracleVector(0), ErrorKind::kFailedPrecondition);
}

TEST(DatasetTest, StructuralErrors) {
  std::vector<Query> qs{{"q0", "t"}};
  EXPECT_ERROR_KIND(Dataset(qs, {}, "", {{}}), ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(Dataset(qs, {"a", "b"}, "c", {{"x", "y"}}),
                    ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(Dataset(qs, {"a", "b"}, "a", {{"x"}}),
                    ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(Dataset(qs, {"a", "b"}, "a", {{"x", "y"}},
                            std::vector<JudgmentVector>{{"q0", Codes("D")}}),
                    ErrorKind::kInvalidArgument);
}

TEST(AnnotationSetTest, RejectsDuplicates) {
  AnnotationSet set;
  set.Append({"q0", Codes("DW")});
  EXPECT_TRUE(set.Contains("q0"));
  EXPECT_FALSE(set.Contains("q1"));
  EXPECT_ERROR_KIND(set.Append({"q0", Codes("DL")}), ErrorKind::kConflict);
  EXPECT_EQ(set.size(), 1u);
}

TEST(NoiseParamsTest, FactorsAndValidation) {
  NoiseParams p(0.2, 0.4);
  EXPECT_DOUBLE_EQ(p.eps_win(), 0.4);
  EXPECT_EQ(p.Factor(Outcome::kLoss), 0.2);
  EXPECT_EQ(p.Factor(Outcome::kDraw), 0.4);
  EXPECT_DOUBLE_EQ(p.LogFactor(Outcome::kWin), std::log(0.4));
  EXPECT_ERROR_KIND(NoiseParams(0.5, 0.5), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(NoiseParams(0.0, 0.5), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(NoiseParams(0.3, 1.0), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(NoiseParams(-0.1, 0.5), ErrorKind::kValidation);
  EXPECT_ERROR_KIND(NoiseParams(0.6, 0.45), ErrorKind::kValidation);
}

TEST(AnnotatedWinRatesTest, PinsBaseline) {
  AnnotationSet set;
  set.Append({"q0", Codes("WWL")});
  set.Append({"q1", Codes("LLD")});
  auto rates = AnnotatedWinRates(set, 3, 0);
  EXPECT_EQ(rates[0], 0.5);
  EXPECT_EQ(rates[1], 0.5);
  EXPECT_EQ(rates[2], 0.25);
}

TEST(AnnotatedWinRatesTest, EmptyThrows) {
  AnnotationSet set;
  EXPECT_ERROR_KIND(AnnotatedWinRates(set, 3, 0),
                    ErrorKind::kFailedPrecondition);
}

TEST(ArgmaxTest, TiebreaksThenIndex) {
  std::vector<double> v{0.5, 0.7, 0.7};
  EXPECT_EQ(ArgmaxWithTiebreak(v), 1u);
  std::vector<double> tb{0.9, 0.1, 0.3};
  EXPECT_EQ(ArgmaxWithTiebreak(v, tb), 2u);
  std::vector<double> same{0.0, 0.2, 0.2};
  EXPECT_EQ(ArgmaxWithTiebreak(v, same), 1u);
}

TEST(SelectFinalModelTest, HighestWinRate) {
  AnnotationSet set;
  set.Append({"q0", Codes("DWL")});
  set.Append({"q1", Codes("DWD")});
  std::vector<double> post{0.1, 0.1, 0.8};
  EXPECT_EQ(SelectFinalModel(set, post, 0), 1u);
}

TEST(SelectFinalModelTest, PosteriorBreaksWinRateTies) {
  AnnotationSet set;
  set.Append({"q0", Codes("DWL")});
  set.Append({"q1", Codes("DLW")});
  std::vector<double> post{0.2, 0.3, 0.5};
  // All three tie at 0.5; model 2 has the largest posterior mass.
  EXPECT_EQ(SelectFinalModel(set, post, 0), 2u);
  std::vector<double> flat{0.2, 0.4, 0.4};
  EXPECT_EQ(SelectFinalModel(set, flat, 0), 1u);
}

TEST(SelectFinalModelTest, BaselineCanWin) {
  AnnotationSet set;
  set.Append({"q0", Codes("DLL")});
  std::vector<double> post{0.5, 0.25, 0.25};
  EXPECT_EQ(SelectFinalModel(set, post, 0), 0u);
}

TEST(SelectFinalModelTest, EmptyThrows) {
  AnnotationSet set;
  std::vector<double> post{0.5, 0.5};
  EXPECT_ERROR_KIND(SelectFinalModel(set, post, 0),
                    ErrorKind::kFailedPrecondition);
}

}  // namespace
}  // namespace actsel
