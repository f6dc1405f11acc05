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

#include "actsel/calibration.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <utility>

#include "actsel/error.h"
#include "actsel/parallel.h"
#include "actsel/rng.h"
#include "actsel/simulator.h"

namespace actsel {

GridSpec GridSpec::WithStep(double step) {
  if (!(step > 0.0 && step < 0.5)) {
    throw Error(ErrorKind::kInvalidArgument, "grid step must be in (0, 0.5)");
  }
  GridSpec grid;
  // Multiply instead of accumulating so 0.05 * 7 stays 0.35.
  for (int i = 1;; ++i) {
    const double v = std::round(i * step * 1e12) / 1e12;
    if (v >= 1.0 - 1e-12) break;
    grid.values.push_back(v);
  }
  return grid;
}

std::vector<std::pair<double, double>> GridSpec::FeasiblePoints() const {
  for (double v : values) {
    if (!(v > 0.0 && v < 1.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "grid values must lie strictly inside (0, 1)");
    }
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::pair<double, double>> points;
  for (double loss : sorted) {
    for (double draw : sorted) {
      if (loss + draw <= max_sum + 1e-12 && loss + draw < 1.0) {
        points.emplace_back(loss, draw);
      }
    }
  }
  return points;
}

JudgmentVector NoisyOracleVector(const Dataset& dataset,
                                 const WeakJudgePanel& panel, QueryIndex q) {
  JudgmentVector v;
  v.query_id = dataset.query(q).id;
  v.outcomes.resize(panel.num_models());
  for (ModelIndex j = 0; j < panel.num_models(); ++j) {
    v.outcomes[j] = j == panel.baseline() ? Outcome::kDraw
                                          : panel.Ensemble(q, j);
  }
  return v;
}

std::vector<double> NoisyWinRates(const WeakJudgePanel& panel,
                                  std::span<const QueryIndex> pool) {
  if (pool.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "pool is empty");
  }
  const std::size_t m = panel.num_models();
  std::vector<long> half_points(m, 0);
  for (QueryIndex q : pool) {
    for (ModelIndex j = 0; j < m; ++j) {
      half_points[j] += j == panel.baseline()
                            ? 1
                            : OutcomeHalfPoints(panel.Ensemble(q, j));
    }
  }
  std::vector<double> rates(m);
  for (ModelIndex j = 0; j < m; ++j) {
    rates[j] = static_cast<double>(half_points[j]) /
               (2.0 * static_cast<double>(pool.size()));
  }
  return rates;
}

ModelIndex NoisyBestModel(const WeakJudgePanel& panel,
                          std::span<const QueryIndex> pool) {
  return ArgmaxWithTiebreak(NoisyWinRates(panel, pool));
}

namespace {

class PrecomputedOracle : public JudgmentSource {
 public:
  explicit PrecomputedOracle(const std::vector<JudgmentVector>& vectors)
      : vectors_(&vectors) {}
  JudgmentVector Judge(QueryIndex q) override { return (*vectors_)[q]; }

 private:
  const std::vector<JudgmentVector>* vectors_;
};

struct CalibrationPool {
  std::vector<QueryIndex> queries;
  std::vector<double> noisy_rates;
  double best_rate = 0.0;
};

}  // namespace

CalibrationResult Calibrate(const Dataset& dataset,
                            const WeakJudgePanel& panel, const GridSpec& grid,
                            const CalibrationOptions& options) {
  const auto points = grid.FeasiblePoints();
  if (points.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "grid has no feasible (eps_loss, eps_draw) point");
  }
  const std::size_t pool_size =
      options.pool_size == 0 ? dataset.num_queries() : options.pool_size;
  if (pool_size > dataset.num_queries()) {
    throw Error(ErrorKind::kInvalidArgument, "pool larger than dataset");
  }
  if (options.budget == 0 || options.budget > pool_size) {
    throw Error(ErrorKind::kInvalidArgument,
                "budget must be in [1, pool size]");
  }
  if (options.realizations == 0) {
    throw Error(ErrorKind::kInvalidArgument, "need at least one realization");
  }

  std::vector<JudgmentVector> noisy(dataset.num_queries());
  for (QueryIndex q = 0; q < dataset.num_queries(); ++q) {
    noisy[q] = NoisyOracleVector(dataset, panel, q);
  }
  std::vector<CalibrationPool> pools(options.realizations);
  for (std::size_t r = 0; r < options.realizations; ++r) {
    CalibrationPool& p = pools[r];
    p.queries = SamplePool(dataset.num_queries(), pool_size,
                           DeriveSeed(options.seed, {r}));
    p.noisy_rates = NoisyWinRates(panel, p.queries);
    p.best_rate = *std::max_element(p.noisy_rates.begin(),
                                    p.noisy_rates.end());
  }

  CalibrationResult result;
  result.realizations = options.realizations;
  result.budget = options.budget;
  result.pool_size = pool_size;
  result.seed = options.seed;
  result.points.resize(points.size());

  ParallelFor(points.size(), options.threads, [&](std::size_t g) {
    GridPointResult& point = result.points[g];
    point.eps_loss = points[g].first;
    point.eps_draw = points[g].second;
    point.hits.assign(options.budget, 0);
    const NoiseParams params(point.eps_loss, point.eps_draw);
    auto selector = MakeStrategy(StrategyKind::kLlmSelector);
    for (const CalibrationPool& pool : pools) {
      SelectionState state(dataset, panel, pool.queries, params,
                           options.budget, 0);
      PrecomputedOracle oracle(noisy);
      for (std::size_t b = 0; b < options.budget; ++b) {
        Step(state, *selector, oracle);
        const ModelIndex chosen = state.FinalModel();
        if (pool.best_rate - pool.noisy_rates[chosen] <= kGapTolerance) {
          ++point.hits[b];
        }
      }
    }
    point.identification.resize(options.budget);
    double area = 0.0;
    for (std::size_t b = 0; b < options.budget; ++b) {
      point.identification[b] = static_cast<double>(point.hits[b]) /
                                static_cast<double>(options.realizations);
      area += point.identification[b];
    }
    point.auc = area / static_cast<double>(options.budget);
  });

  // Points are already in lexicographic order, so keeping the first of
  // equal candidates resolves the last tiebreak.
  std::size_t best = 0;
  std::size_t best_area = 0;
  auto area_of = [&](const GridPointResult& p) {
    std::size_t a = 0;
    for (std::size_t h : p.hits) a += h;
    return a;
  };
  best_area = area_of(result.points[0]);
  for (std::size_t g = 1; g < result.points.size(); ++g) {
    const std::size_t hits = result.points[g].hits.back();
    const std::size_t best_hits = result.points[best].hits.back();
    const std::size_t area = area_of(result.points[g]);
    if (hits > best_hits || (hits == best_hits && area > best_area)) {
      best = g;
      best_area = area;
    }
  }
  result.eps_loss = result.points[best].eps_loss;
  result.eps_draw = result.points[best].eps_draw;
  return result;
}

ModelIndex AutoSelectBaseline(const LikelihoodTable& table, int judges) {
  const std::size_t m = table.num_models();
  if (m < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "baseline auto-selection needs at least two models");
  }
  if (judges < 1 || judges > table.max_order()) {
    throw Error(ErrorKind::kInvalidArgument, "bad judge count");
  }
  std::vector<long> half_points(m, 0);
  std::vector<Outcome> decisions(static_cast<std::size_t>(judges));
  for (QueryIndex q = 0; q < table.num_queries(); ++q) {
    for (ModelIndex i = 0; i < m; ++i) {
      for (ModelIndex j = 0; j < m; ++j) {
        if (i == j) continue;
        for (int k = 1; k <= judges; ++k) {
          decisions[static_cast<std::size_t>(k - 1)] =
              CompareLikelihoods(table.at(q, i, k), table.at(q, j, k));
        }
        half_points[i] += OutcomeHalfPoints(EnsembleOutcome(decisions));
      }
    }
  }
  // Every model plays the same number of games, so totals rank like means.
  std::vector<double> means(m);
  const double games =
      static_cast<double>(table.num_queries() * (m - 1)) * 2.0;
  for (ModelIndex i = 0; i < m; ++i) {
    means[i] = games > 0.0 ? static_cast<double>(half_points[i]) / games : 0.0;
  }
  return ArgmaxWithTiebreak(means);
}

nlohmann::json CalibrationToJson(const CalibrationResult& result) {
  nlohmann::json points = nlohmann::json::array();
  for (const GridPointResult& p : result.points) {
    points.push_back({{"eps_loss", p.eps_loss},
                      {"eps_draw", p.eps_draw},
                      {"identification_probability", p.identification},
                      {"objective", p.identification.back()},
                      {"auc", p.auc}});
  }
  return {
      {"eps_loss", result.eps_loss},
      {"eps_draw", result.eps_draw},
      {"budget", result.budget},
      {"pool_size", result.pool_size},
      {"realizations", result.realizations},
      {"seed", result.seed},
      {"grid", points},
  };
}

void WriteCalibration(const CalibrationResult& result,
                      const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kInternal, "cannot write " + path.string());
  }
  out << CalibrationToJson(result).dump(2) << '\n';
}

NoiseParams ReadCalibrationParams(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kNotFound,
                "cannot open calibration report: " + path.string());
  }
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    return NoiseParams(j.at("eps_loss").get<double>(),
                       j.at("eps_draw").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse,
                std::string("malformed calibration report: ") + e.what());
  }
}

}  // namespace actsel
