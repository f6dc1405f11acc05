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

#include "actsel/simulator.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "actsel/error.h"
#include "actsel/parallel.h"
#include "actsel/rng.h"

namespace actsel {

double RealizationTrajectory::Gap(std::size_t budget) const {
  if (budget == 0 || budget > chosen.size()) {
    throw Error(ErrorKind::kInvalidArgument, "budget outside trajectory");
  }
  return pool_win_rates[true_best] - pool_win_rates[chosen[budget - 1]];
}

std::vector<QueryIndex> SamplePool(std::size_t dataset_size,
                                   std::size_t pool_size,
                                   std::uint64_t seed) {
  if (pool_size > dataset_size) {
    throw Error(ErrorKind::kInvalidArgument, "pool larger than dataset");
  }
  Rng rng(seed);
  return SampleWithoutReplacement(rng, dataset_size, pool_size);
}

std::vector<double> PoolWinRates(const Dataset& dataset,
                                 std::span<const QueryIndex> pool) {
  AnnotationSet all;
  for (QueryIndex q : pool) all.Append(dataset.OracleVector(q));
  return AnnotatedWinRates(all, dataset.num_models(), dataset.baseline());
}

RealizationTrajectory RunRealization(const Dataset& dataset,
                                     const WeakJudgePanel& panel,
                                     StrategyKind strategy,
                                     const SimulationConfig& config,
                                     std::uint64_t seed) {
  if (!dataset.has_oracle()) {
    throw Error(ErrorKind::kFailedPrecondition,
                "simulation needs oracle judgments (replay mode)");
  }
  if (config.budget == 0 || config.budget > config.pool_size) {
    throw Error(ErrorKind::kInvalidArgument,
                "budget must be in [1, pool size]");
  }
  RealizationTrajectory traj;
  traj.seed = seed;
  traj.strategy = strategy;
  traj.pool = SamplePool(dataset.num_queries(), config.pool_size,
                         DeriveSeed(seed, {0}));
  traj.pool_win_rates = PoolWinRates(dataset, traj.pool);
  traj.true_best = ArgmaxWithTiebreak(traj.pool_win_rates);

  SelectionState state(dataset, panel, traj.pool, config.params,
                       config.budget, DeriveSeed(seed, {1}));
  auto policy = MakeStrategy(strategy, config.strategy_options);
  ReplayOracle oracle(dataset);
  traj.chosen.reserve(config.budget);
  while (!state.exhausted()) {
    Step(state, *policy, oracle);
    traj.chosen.push_back(state.FinalModel());
  }
  traj.order = state.annotation_order();
  return traj;
}

double IdentificationProbability(
    std::span<const RealizationTrajectory> trajectories, std::size_t budget) {
  if (trajectories.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no realizations");
  }
  std::size_t hits = 0;
  for (const auto& t : trajectories) hits += t.Identified(budget) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(trajectories.size());
}

std::vector<double> WithinDeltaCurve(
    std::span<const RealizationTrajectory> trajectories, double delta) {
  if (trajectories.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no realizations");
  }
  std::size_t max_budget = trajectories.front().chosen.size();
  for (const auto& t : trajectories) {
    max_budget = std::min(max_budget, t.chosen.size());
  }
  std::vector<double> curve(max_budget);
  for (std::size_t b = 1; b <= max_budget; ++b) {
    std::size_t hits = 0;
    for (const auto& t : trajectories) {
      hits += t.Gap(b) <= delta + kGapTolerance ? 1 : 0;
    }
    curve[b - 1] =
        static_cast<double>(hits) / static_cast<double>(trajectories.size());
  }
  return curve;
}

std::optional<std::size_t> LabelsToTarget(std::span<const double> curve,
                                          double level) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i] >= level - kGapTolerance) return i + 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> LabelsToTarget(
    std::span<const RealizationTrajectory> trajectories, double delta,
    double level) {
  return LabelsToTarget(WithinDeltaCurve(trajectories, delta), level);
}

double EfficiencyReduction(std::size_t ours, std::size_t theirs) {
  if (theirs == 0) {
    throw Error(ErrorKind::kInvalidArgument, "reference label count is 0");
  }
  return (static_cast<double>(theirs) - static_cast<double>(ours)) /
         static_cast<double>(theirs);
}

double NearestRankPercentile(std::vector<double> values, double pct) {
  if (values.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no values");
  }
  if (!(pct > 0.0 && pct <= 100.0)) {
    throw Error(ErrorKind::kInvalidArgument, "percentile must be in (0, 100]");
  }
  std::sort(values.begin(), values.end());
  // The small slack keeps 95/100 * 100 from rounding up to rank 96.
  auto rank = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(values.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

double WinRateGapPercentile(
    std::span<const RealizationTrajectory> trajectories, std::size_t budget,
    double pct) {
  if (trajectories.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no realizations");
  }
  std::vector<double> gaps;
  gaps.reserve(trajectories.size());
  for (const auto& t : trajectories) gaps.push_back(std::max(0.0, t.Gap(budget)));
  return NearestRankPercentile(std::move(gaps), pct);
}

MetricsReport RunCampaign(const Dataset& dataset, const WeakJudgePanel& panel,
                          const CampaignConfig& config) {
  if (config.strategies.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no strategies");
  }
  if (config.realizations == 0) {
    throw Error(ErrorKind::kInvalidArgument, "need at least one realization");
  }
  SimulationConfig sim{config.pool_size, config.budget, config.params,
                       config.strategy_options};
  const std::size_t s_count = config.strategies.size();
  const std::size_t r_count = config.realizations;
  std::vector<std::vector<RealizationTrajectory>> runs(
      s_count, std::vector<RealizationTrajectory>(r_count));
  ParallelFor(s_count * r_count, config.threads, [&](std::size_t job) {
    const std::size_t s = job / r_count;
    const std::size_t r = job % r_count;
    runs[s][r] = RunRealization(dataset, panel, config.strategies[s], sim,
                                DeriveSeed(config.master_seed, {r}));
  });
  return Summarize(config, std::move(runs));
}

MetricsReport Summarize(const CampaignConfig& config,
                        std::vector<std::vector<RealizationTrajectory>> runs) {
  MetricsReport report;
  report.config = config;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    StrategyMetrics metrics;
    metrics.kind = config.strategies.at(s);
    metrics.realizations = std::move(runs[s]);
    const auto& trajs = metrics.realizations;
    for (double delta : kTargetDeltas) {
      metrics.within_delta.push_back(WithinDeltaCurve(trajs, delta));
      for (double level : kTargetLevels) {
        metrics.targets.push_back(
            {delta, level, LabelsToTarget(metrics.within_delta.back(), level)});
      }
    }
    metrics.identification = metrics.within_delta.front();
    report.strategies.push_back(std::move(metrics));
  }
  if (report.strategies.empty()) return report;

  // Gap percentiles at the budgets the first strategy needs per level.
  const StrategyMetrics& reference = report.strategies.front();
  for (StrategyMetrics& metrics : report.strategies) {
    for (double level : kTargetLevels) {
      GapResult g;
      g.level = level;
      g.budget = LabelsToTarget(reference.identification, level);
      if (g.budget) {
        g.gap = WinRateGapPercentile(metrics.realizations, *g.budget, 95.0);
      }
      metrics.gaps.push_back(g);
    }
  }

  for (std::size_t i = 0; i < reference.targets.size(); ++i) {
    EfficiencyResult e;
    e.delta = reference.targets[i].delta;
    e.level = reference.targets[i].level;
    e.ours = reference.targets[i].labels;
    for (std::size_t s = 1; s < report.strategies.size(); ++s) {
      const auto& other = report.strategies[s].targets[i].labels;
      if (other && (!e.best_other_labels || *other < *e.best_other_labels)) {
        e.best_other_labels = other;
        e.best_other = report.strategies[s].kind;
      }
    }
    if (e.ours && e.best_other_labels) {
      e.reduction = EfficiencyReduction(*e.ours, *e.best_other_labels);
    }
    report.efficiency.push_back(e);
  }
  return report;
}

namespace {

nlohmann::json OptionalJson(const std::optional<std::size_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string DeltaKey(double delta) {
  std::ostringstream os;
  os << delta;
  return os.str();
}

}  // namespace

nlohmann::json ReportToJson(const MetricsReport& report,
                            const Dataset& dataset) {
  const CampaignConfig& c = report.config;
  nlohmann::json strategies = nlohmann::json::array();
  for (StrategyKind k : c.strategies) strategies.push_back(StrategyName(k));
  nlohmann::json out;
  out["config"] = {
      {"strategies", strategies},
      {"pool_size", c.pool_size},
      {"budget", c.budget},
      {"realizations", c.realizations},
      {"master_seed", c.master_seed},
      {"eps_loss", c.params.eps_loss()},
      {"eps_draw", c.params.eps_draw()},
      {"bt_regularization", c.strategy_options.bt_regularization},
      {"baseline", dataset.baseline_id()},
      {"num_queries", dataset.num_queries()},
      {"num_models", dataset.num_models()},
  };
  out["strategies"] = nlohmann::json::array();
  for (const StrategyMetrics& m : report.strategies) {
    nlohmann::json s;
    s["name"] = StrategyName(m.kind);
    s["identification_probability"] = m.identification;
    nlohmann::json within = nlohmann::json::object();
    for (std::size_t d = 0; d < m.within_delta.size(); ++d) {
      within[DeltaKey(kTargetDeltas[d])] = m.within_delta[d];
    }
    s["within_delta"] = within;
    s["labels_to_target"] = nlohmann::json::array();
    for (const TargetResult& t : m.targets) {
      s["labels_to_target"].push_back({{"delta", t.delta},
                                       {"level", t.level},
                                       {"labels", OptionalJson(t.labels)}});
    }
    s["winrate_gap_p95"] = nlohmann::json::array();
    for (const GapResult& g : m.gaps) {
      s["winrate_gap_p95"].push_back({{"level", g.level},
                                      {"budget", OptionalJson(g.budget)},
                                      {"gap", OptionalJson(g.gap)}});
    }
    out["strategies"].push_back(std::move(s));
  }
  out["efficiency"] = nlohmann::json::array();
  for (const EfficiencyResult& e : report.efficiency) {
    out["efficiency"].push_back(
        {{"delta", e.delta},
         {"level", e.level},
         {"labels", OptionalJson(e.ours)},
         {"best_other",
          e.best_other ? nlohmann::json(StrategyName(*e.best_other))
                       : nlohmann::json(nullptr)},
         {"best_other_labels", OptionalJson(e.best_other_labels)},
         {"reduction", OptionalJson(e.reduction)}});
  }
  return out;
}

std::string ReportTable(const MetricsReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "strategy,budget,identification_probability,within_1pct,"
        "within_2_5pct,within_5pct,winrate_gap_p95\n";
  for (const StrategyMetrics& m : report.strategies) {
    for (std::size_t b = 1; b <= m.identification.size(); ++b) {
      os << StrategyName(m.kind) << ',' << b << ',' << m.identification[b - 1]
         << ',' << m.within_delta[1][b - 1] << ',' << m.within_delta[2][b - 1]
         << ',' << m.within_delta[3][b - 1] << ','
         << WinRateGapPercentile(m.realizations, b, 95.0) << '\n';
    }
  }
  return os.str();
}

std::string RealizationRecords(const MetricsReport& report,
                               const Dataset& dataset) {
  std::string out;
  for (const StrategyMetrics& m : report.strategies) {
    for (std::size_t r = 0; r < m.realizations.size(); ++r) {
      const RealizationTrajectory& t = m.realizations[r];
      nlohmann::json rec;
      rec["strategy"] = StrategyName(m.kind);
      rec["realization"] = r;
      rec["seed"] = t.seed;
      nlohmann::json pool = nlohmann::json::array();
      for (QueryIndex q : t.pool) pool.push_back(dataset.query(q).id);
      rec["pool"] = pool;
      nlohmann::json order = nlohmann::json::array();
      for (QueryIndex q : t.order) order.push_back(dataset.query(q).id);
      rec["order"] = order;
      nlohmann::json chosen = nlohmann::json::array();
      for (ModelIndex j : t.chosen) chosen.push_back(dataset.model_id(j));
      rec["chosen"] = chosen;
      rec["true_best"] = dataset.model_id(t.true_best);
      nlohmann::json rates = nlohmann::json::object();
      for (ModelIndex j = 0; j < t.pool_win_rates.size(); ++j) {
        rates[dataset.model_id(j)] = t.pool_win_rates[j];
      }
      rec["pool_win_rates"] = rates;
      out += rec.dump();
      out += '\n';
    }
  }
  return out;
}

void WriteReport(const MetricsReport& report, const Dataset& dataset,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      throw Error(ErrorKind::kInternal,
                  "cannot write " + (dir / name).string());
    }
    out << content;
  };
  write("report.json", ReportToJson(report, dataset).dump(2) + "\n");
  write("report.csv", ReportTable(report));
  write("realizations.jsonl", RealizationRecords(report, dataset));
}

}  // namespace actsel
