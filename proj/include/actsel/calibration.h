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

// Oracle-free parameter selection: grid search over (eps_loss, eps_draw)
// with the weak-judge ensemble standing in for the oracle, and baseline
// auto-selection by weak-judge round-robin.

#ifndef ACTSEL_CALIBRATION_H_
#define ACTSEL_CALIBRATION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "actsel/core.h"
#include "actsel/ngram.h"
#include "actsel/strategies.h"
#include "json.hpp"

namespace actsel {

struct GridSpec {
  // Ascending probabilities, each in (0, 1).
  std::vector<double> values;
  // Feasible points satisfy eps_loss + eps_draw <= max_sum.
  double max_sum = 0.95;

  // 0.05, 0.10, ..., 0.95.
  static GridSpec Default() { return WithStep(0.05); }
  // step, 2*step, ... up to 1 - step.
  static GridSpec WithStep(double step);

  // Points in lexicographic (eps_loss, eps_draw) order. Throws
  // Error(kInvalidArgument) on values outside (0, 1).
  std::vector<std::pair<double, double>> FeasiblePoints() const;
};

struct CalibrationOptions {
  std::size_t budget = 0;
  // 0 means the whole dataset.
  std::size_t pool_size = 0;
  std::size_t realizations = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct GridPointResult {
  double eps_loss = 0.0;
  double eps_draw = 0.0;
  // Identification counts for budgets 1..b, out of `realizations`.
  std::vector<std::size_t> hits;
  // hits / realizations.
  std::vector<double> identification;
  // Mean identification probability over budgets 1..b.
  double auc = 0.0;
};

struct CalibrationResult {
  double eps_loss = 0.0;
  double eps_draw = 0.0;
  std::vector<GridPointResult> points;
  std::size_t realizations = 0;
  std::size_t budget = 0;
  std::size_t pool_size = 0;
  std::uint64_t seed = 0;

  NoiseParams params() const { return NoiseParams(eps_loss, eps_draw); }
};

// Ensemble decision per candidate as a judgment vector; the baseline is Draw.
JudgmentVector NoisyOracleVector(const Dataset& dataset,
                                 const WeakJudgePanel& panel, QueryIndex q);

// Mean ensemble score of every model over the pool.
std::vector<double> NoisyWinRates(const WeakJudgePanel& panel,
                                  std::span<const QueryIndex> pool);

// Argmax of NoisyWinRates, smallest index on ties.
ModelIndex NoisyBestModel(const WeakJudgePanel& panel,
                          std::span<const QueryIndex> pool);

// Judges with the weak-judge ensemble.
class NoisyOracle : public JudgmentSource {
 public:
  NoisyOracle(const Dataset& dataset, const WeakJudgePanel& panel)
      : dataset_(&dataset), panel_(&panel) {}
  JudgmentVector Judge(QueryIndex q) override {
    return NoisyOracleVector(*dataset_, *panel_, q);
  }

 private:
  const Dataset* dataset_;
  const WeakJudgePanel* panel_;
};

// Runs `realizations` selector loops per feasible grid point against the
// noisy oracle and returns the point with the highest identification count
// at the budget; ties go to the larger area under the curve, then to the
// lexicographically smaller point. Realization r samples the same pool for
// every grid point. Never reads the dataset's oracle.
CalibrationResult Calibrate(const Dataset& dataset,
                            const WeakJudgePanel& panel, const GridSpec& grid,
                            const CalibrationOptions& options);

// Model with the best mean ensemble score in a weak-judge round-robin where
// every other model takes a turn as baseline. Throws Error(kInvalidArgument)
// with fewer than two models.
ModelIndex AutoSelectBaseline(const LikelihoodTable& table, int judges);

nlohmann::json CalibrationToJson(const CalibrationResult& result);
void WriteCalibration(const CalibrationResult& result,
                      const std::filesystem::path& path);
// Reads the chosen parameters back from a calibration report.
NoiseParams ReadCalibrationParams(const std::filesystem::path& path);

}  // namespace actsel

#endif  // ACTSEL_CALIBRATION_H_
