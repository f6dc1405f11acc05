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

// Synthetic instances with a planted best model: oracle outcomes are drawn
// from each model's noise parameters and the weak judges are noisy copies of
// the oracle. Ground truth is known by construction.

#ifndef ACTSEL_SYNTHETIC_H_
#define ACTSEL_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "actsel/core.h"
#include "actsel/ngram.h"

namespace actsel {

struct PlantedConfig {
  std::size_t num_queries = 200;
  // Including the baseline, which is model 0.
  std::size_t num_models = 10;
  double best_loss = 0.15;
  double best_draw = 0.25;
  // Every other candidate loses with best_loss + U(min, max) extra.
  double worse_loss_min = 0.05;
  double worse_loss_max = 0.30;
  double other_draw = 0.25;
  int judges = kDefaultJudgeCount;
  // A judge reports the oracle outcome with this probability and a uniform
  // random outcome otherwise.
  double judge_accuracy = 0.6;
};

struct PlantedInstance {
  Dataset dataset;
  WeakJudgePanel panel;
  ModelIndex planted_best = 0;
  // (loss, draw) per model; the baseline entry is unused.
  std::vector<std::pair<double, double>> model_params;
};

// Throws Error(kInvalidArgument) on fewer than two candidates, no queries or
// probabilities that do not form a distribution.
PlantedInstance GeneratePlanted(const PlantedConfig& config,
                                std::uint64_t seed);

}  // namespace actsel

#endif  // ACTSEL_SYNTHETIC_H_
