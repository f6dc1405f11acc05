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

// Seeded realizations (pool sampling, strategy run, per-budget selections)
// and the campaign metrics computed over them.

#ifndef ACTSEL_SIMULATOR_H_
#define ACTSEL_SIMULATOR_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actsel/core.h"
#include "actsel/ngram.h"
#include "actsel/strategies.h"
#include "json.hpp"

namespace actsel {

// Win-rate differences at or below this count as zero, so a chosen model
// tied with the true best is never scored as a miss.
inline constexpr double kGapTolerance = 1e-12;

inline constexpr double kTargetDeltas[] = {0.0, 0.01, 0.025, 0.05};
inline constexpr double kTargetLevels[] = {0.80, 0.90, 0.95, 1.00};

struct SimulationConfig {
  std::size_t pool_size = 0;
  std::size_t budget = 0;
  NoiseParams params{0.2, 0.4};
  StrategyOptions strategy_options;
};

struct RealizationTrajectory {
  std::uint64_t seed = 0;
  StrategyKind strategy = StrategyKind::kLlmSelector;
  std::vector<QueryIndex> pool;
  std::vector<QueryIndex> order;
  // chosen[b - 1] is the selection after b annotations.
  std::vector<ModelIndex> chosen;
  ModelIndex true_best = 0;
  // Oracle win rate of every model over the whole pool.
  std::vector<double> pool_win_rates;

  // WR(true best) - WR(chosen at budget); budget is 1-based.
  double Gap(std::size_t budget) const;
  bool Identified(std::size_t budget) const {
    return Gap(budget) <= kGapTolerance;
  }
};

// Pool of `pool_size` distinct queries, ascending dataset order.
std::vector<QueryIndex> SamplePool(std::size_t dataset_size,
                                   std::size_t pool_size, std::uint64_t seed);

// Oracle win rate of every model over the pool (baseline pinned at 0.5).
std::vector<double> PoolWinRates(const Dataset& dataset,
                                 std::span<const QueryIndex> pool);

// One realization: the pool and the strategy's RNG are both derived from
// `seed`. Requires replay mode.
RealizationTrajectory RunRealization(const Dataset& dataset,
                                     const WeakJudgePanel& panel,
                                     StrategyKind strategy,
                                     const SimulationConfig& config,
                                     std::uint64_t seed);

// Fraction of trajectories whose selection at `budget` is the pool's best.
// Throws Error(kInvalidArgument) on empty input.
double IdentificationProbability(
    std::span<const RealizationTrajectory> trajectories, std::size_t budget);

// Fraction within `delta` absolute win rate of the best, for budgets
// 1..max_budget. delta = 0 is exact identification.
std::vector<double> WithinDeltaCurve(
    std::span<const RealizationTrajectory> trajectories, double delta);

// Smallest 1-based budget whose curve value reaches `level`; nullopt when it
// never does.
std::optional<std::size_t> LabelsToTarget(std::span<const double> curve,
                                          double level);
std::optional<std::size_t> LabelsToTarget(
    std::span<const RealizationTrajectory> trajectories, double delta,
    double level);

// Relative label reduction of `ours` against `theirs`: (theirs - ours) /
// theirs.
double EfficiencyReduction(std::size_t ours, std::size_t theirs);

// Nearest-rank percentile: the ceil(pct/100 * R)-th smallest value.
double NearestRankPercentile(std::vector<double> values, double pct);

double WinRateGapPercentile(
    std::span<const RealizationTrajectory> trajectories, std::size_t budget,
    double pct = 95.0);

struct CampaignConfig {
  std::vector<StrategyKind> strategies;
  std::size_t pool_size = 0;
  std::size_t budget = 0;
  std::size_t realizations = 0;
  std::uint64_t master_seed = 0;
  NoiseParams params{0.2, 0.4};
  StrategyOptions strategy_options;
  // 0 uses the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

struct TargetResult {
  double delta = 0.0;
  double level = 0.0;
  std::optional<std::size_t> labels;
};

struct GapResult {
  double level = 0.0;
  // Reference budget: labels the first campaign strategy needs to reach the
  // level of exact identification.
  std::optional<std::size_t> budget;
  std::optional<double> gap;
};

struct StrategyMetrics {
  StrategyKind kind = StrategyKind::kLlmSelector;
  std::vector<double> identification;
  // One curve per entry of kTargetDeltas.
  std::vector<std::vector<double>> within_delta;
  std::vector<TargetResult> targets;
  std::vector<GapResult> gaps;
  std::vector<RealizationTrajectory> realizations;
};

struct EfficiencyResult {
  double delta = 0.0;
  double level = 0.0;
  std::optional<std::size_t> ours;
  std::optional<StrategyKind> best_other;
  std::optional<std::size_t> best_other_labels;
  std::optional<double> reduction;
};

struct MetricsReport {
  CampaignConfig config;
  std::vector<StrategyMetrics> strategies;
  // The first strategy against the best of the others.
  std::vector<EfficiencyResult> efficiency;
};

// Realization r of every strategy uses seed DeriveSeed(master_seed, {r}), so
// strategies are compared on identical pools.
MetricsReport RunCampaign(const Dataset& dataset, const WeakJudgePanel& panel,
                          const CampaignConfig& config);

// Aggregates precomputed trajectories (strategies in config order, R each).
MetricsReport Summarize(const CampaignConfig& config,
                        std::vector<std::vector<RealizationTrajectory>> runs);

nlohmann::json ReportToJson(const MetricsReport& report,
                            const Dataset& dataset);
// One row per strategy x budget.
std::string ReportTable(const MetricsReport& report);
// One JSON object per line per realization.
std::string RealizationRecords(const MetricsReport& report,
                               const Dataset& dataset);

// Writes report.json, report.csv and realizations.jsonl into `dir`.
void WriteReport(const MetricsReport& report, const Dataset& dataset,
                 const std::filesystem::path& dir);

}  // namespace actsel

#endif  // ACTSEL_SIMULATOR_H_
