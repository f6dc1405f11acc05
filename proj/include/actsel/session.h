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

// Live annotation sessions: the engine proposes queries, an external oracle
// submits judgment vectors, and state advances exactly like an offline
// selection run. Sessions persist as append-only transcripts and are rebuilt
// by replay.

#ifndef ACTSEL_SESSION_H_
#define ACTSEL_SESSION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "actsel/core.h"
#include "actsel/ngram.h"
#include "actsel/strategies.h"
#include "json.hpp"

namespace actsel {

struct SessionConfig {
  std::string dataset_id;
  StrategyKind strategy = StrategyKind::kLlmSelector;
  double eps_loss = 0.2;
  double eps_draw = 0.4;
  int judges = kDefaultJudgeCount;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
};

enum class SessionStatus { kActive, kExhausted, kFinalized };

std::string_view SessionStatusName(SessionStatus status);

struct StateSummary {
  std::string session_id;
  SessionStatus status = SessionStatus::kActive;
  std::size_t t = 0;
  std::size_t budget = 0;
  std::uint64_t revision = 0;
  std::vector<std::pair<std::string, double>> posterior;
  double entropy = 0.0;
  std::string leader;
  std::optional<std::string> pending_query;
};

struct Proposal {
  std::string query_id;
  std::string query_text;
  std::string baseline_id;
  std::string baseline_response;
  // (model id, response) for every non-baseline model.
  std::vector<std::pair<std::string, std::string>> candidate_responses;
  std::size_t budget_remaining = 0;
  std::uint64_t revision = 0;
};

struct FinalResult {
  std::string selected_model;
  std::vector<std::pair<std::string, double>> win_rates;
  std::vector<std::pair<std::string, double>> posterior;
  std::vector<JudgmentVector> annotations;
};

struct DatasetInfo {
  std::string id;
  std::size_t num_queries = 0;
  std::size_t num_models = 0;
  std::string baseline;
};

nlohmann::json ToJson(const StateSummary& s);
nlohmann::json ToJson(const Proposal& p);
nlohmann::json ToJson(const FinalResult& r, const Dataset& dataset);
nlohmann::json ToJson(const DatasetInfo& d);

class Session;

// Owns the loaded datasets and every session. All methods are thread-safe;
// mutations of one session are serialized, distinct sessions proceed
// independently.
class SessionManager {
 public:
  // With a storage directory, every accepted mutation is appended to
  // <dir>/<session_id>.jsonl before it is acknowledged.
  explicit SessionManager(
      std::optional<std::filesystem::path> storage_dir = std::nullopt);
  ~SessionManager();

  void AddDataset(const std::string& id, Dataset dataset);
  std::vector<DatasetInfo> Datasets() const;

  // Throws Error(kNotFound) for an unknown dataset and Error(kValidation)
  // for bad parameters, budget or judge count.
  StateSummary CreateSession(const SessionConfig& config);

  // Pins and returns the next proposal; repeated calls return the same
  // proposal until judgments are submitted. Throws Error(kFailedPrecondition)
  // once the session is exhausted or finalized.
  Proposal NextQuery(const std::string& session_id);

  // outcomes: model id -> outcome for every candidate (the baseline may be
  // omitted; if given it must be Draw). Throws Error(kConflict) on a stale
  // revision or a query that is not the pending proposal and
  // Error(kValidation) on an incomplete or invalid vector.
  StateSummary SubmitJudgments(
      const std::string& session_id, const std::string& query_id,
      const std::vector<std::pair<std::string, Outcome>>& outcomes,
      std::uint64_t expected_revision);

  FinalResult Finalize(const std::string& session_id);
  StateSummary GetState(const std::string& session_id) const;

  const Dataset& DatasetFor(const std::string& session_id) const;

  // Rebuilds sessions from the transcripts in the storage directory.
  // Returns the number of sessions restored.
  std::size_t Recover();

 private:
  struct LoadedDataset {
    Dataset dataset;
    std::map<int, std::shared_ptr<const WeakJudgePanel>> panels;
  };

  std::shared_ptr<Session> Find(const std::string& session_id) const;
  std::shared_ptr<const WeakJudgePanel> PanelFor(const std::string& dataset_id,
                                                 int judges);
  std::shared_ptr<Session> Build(const std::string& id,
                                 const SessionConfig& config);
  void Append(const std::string& session_id, const nlohmann::json& event);

  std::optional<std::filesystem::path> storage_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<LoadedDataset>> datasets_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace actsel

#endif  // ACTSEL_SESSION_H_
