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

#include "actsel/synthetic.h"

#include <string>
#include <utility>

#include "actsel/error.h"
#include "actsel/rng.h"

namespace actsel {
namespace {

Outcome Draw(Rng& rng, double loss, double draw) {
  const double u = UniformUnit(rng);
  if (u < loss) return Outcome::kLoss;
  if (u < loss + draw) return Outcome::kDraw;
  return Outcome::kWin;
}

}  // namespace

PlantedInstance GeneratePlanted(const PlantedConfig& config,
                                std::uint64_t seed) {
  const std::size_t n = config.num_queries;
  const std::size_t m = config.num_models;
  if (m < 3) {
    throw Error(ErrorKind::kInvalidArgument,
                "planted instances need at least two candidates");
  }
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "no queries");
  if (config.judges < 1) {
    throw Error(ErrorKind::kInvalidArgument, "judges must be at least 1");
  }
  const double worst = config.best_loss + config.worse_loss_max;
  if (config.best_loss < 0 || config.best_draw < 0 ||
      config.best_loss + config.best_draw > 1 || config.other_draw < 0 ||
      config.worse_loss_min < 0 || config.worse_loss_max < config.worse_loss_min ||
      worst + config.other_draw > 1 || config.judge_accuracy < 0 ||
      config.judge_accuracy > 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "planted probabilities do not form a distribution");
  }

  Rng rng(DeriveSeed(seed, {0}));
  PlantedInstance out{Dataset({{"q", "q"}}, {"a", "b"}, "a", {{"", ""}}),
                      {}, 0, {}};
  out.planted_best = 1 + UniformIndex(rng, m - 1);
  out.model_params.assign(m, {0.0, 0.0});
  for (ModelIndex j = 1; j < m; ++j) {
    if (j == out.planted_best) {
      out.model_params[j] = {config.best_loss, config.best_draw};
    } else {
      const double extra =
          config.worse_loss_min +
          (config.worse_loss_max - config.worse_loss_min) * UniformUnit(rng);
      out.model_params[j] = {config.best_loss + extra, config.other_draw};
    }
  }

  std::vector<Query> queries;
  std::vector<std::string> models;
  std::vector<std::vector<std::string>> responses(
      n, std::vector<std::string>(m));
  std::vector<JudgmentVector> oracle;
  for (ModelIndex j = 0; j < m; ++j) models.push_back("model-" + std::to_string(j));
  for (QueryIndex q = 0; q < n; ++q) {
    const std::string id = "q" + std::to_string(q);
    queries.push_back({id, id});
    JudgmentVector v{id, std::vector<Outcome>(m, Outcome::kDraw)};
    for (ModelIndex j = 1; j < m; ++j) {
      v.outcomes[j] =
          Draw(rng, out.model_params[j].first, out.model_params[j].second);
    }
    oracle.push_back(std::move(v));
  }

  std::vector<Outcome> decisions(n * config.judges * m, Outcome::kDraw);
  for (QueryIndex q = 0; q < n; ++q) {
    for (int k = 1; k <= config.judges; ++k) {
      for (ModelIndex j = 1; j < m; ++j) {
        Outcome o = oracle[q].outcomes[j];
        if (UniformUnit(rng) >= config.judge_accuracy) {
          o = kAllOutcomes[UniformIndex(rng, 3)];
        }
        decisions[(q * config.judges + (k - 1)) * m + j] = o;
      }
    }
  }
  out.dataset = Dataset(std::move(queries), std::move(models), "model-0",
                        std::move(responses), std::move(oracle));
  out.panel = WeakJudgePanel::FromDecisions(n, m, 0, config.judges,
                                            std::move(decisions));
  return out;
}

}  // namespace actsel
