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

#include "actsel/session.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <utility>

#include "actsel/error.h"

namespace actsel {

std::string_view SessionStatusName(SessionStatus status) {
  switch (status) {
    case SessionStatus::kActive:
      return "active";
    case SessionStatus::kExhausted:
      return "exhausted";
    case SessionStatus::kFinalized:
      return "finalized";
  }
  return "active";
}

// One live selection run. Guarded by `mu`.
class Session {
 public:
  Session(std::string id, SessionConfig config, const Dataset& dataset,
          std::shared_ptr<const WeakJudgePanel> panel, std::vector<QueryIndex> pool)
      : id_(std::move(id)),
        config_(std::move(config)),
        dataset_(&dataset),
        panel_(std::move(panel)),
        state_(dataset, *panel_, std::move(pool),
               NoiseParams(config_.eps_loss, config_.eps_draw), config_.budget,
               config_.seed),
        strategy_(MakeStrategy(config_.strategy)) {}

  std::mutex mu;

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }
  const Dataset& dataset() const { return *dataset_; }
  SessionStatus status() const { return status_; }
  std::uint64_t revision() const { return revision_; }
  const std::optional<QueryIndex>& pending() const { return pending_; }
  const SelectionState& state() const { return state_; }

  QueryIndex Propose() {
    if (status_ == SessionStatus::kFinalized) {
      throw Error(ErrorKind::kFailedPrecondition, "session is finalized");
    }
    if (status_ == SessionStatus::kExhausted) {
      throw Error(ErrorKind::kFailedPrecondition, "budget exhausted");
    }
    if (!pending_) pending_ = strategy_->SelectNext(state_);
    return *pending_;
  }

  void Apply(QueryIndex q, JudgmentVector vector) {
    state_.Record(q, std::move(vector));
    pending_.reset();
    ++revision_;
    if (state_.exhausted()) status_ = SessionStatus::kExhausted;
  }

  void MarkFinalized() {
    status_ = SessionStatus::kFinalized;
    pending_.reset();
    ++revision_;
  }

  ModelIndex Leader() const {
    if (state_.annotations().empty()) {
      auto p = state_.posterior().Probabilities();
      return ArgmaxWithTiebreak(p);
    }
    return state_.FinalModel();
  }

  StateSummary Summary() const {
    StateSummary s;
    s.session_id = id_;
    s.status = status_;
    s.t = state_.t();
    s.budget = state_.budget();
    s.revision = revision_;
    auto probs = state_.posterior().Probabilities();
    for (ModelIndex j = 0; j < probs.size(); ++j) {
      s.posterior.emplace_back(dataset_->model_id(j), probs[j]);
    }
    s.entropy = state_.posterior().Entropy();
    s.leader = dataset_->model_id(Leader());
    if (pending_) s.pending_query = dataset_->query(*pending_).id;
    return s;
  }

 private:
  std::string id_;
  SessionConfig config_;
  const Dataset* dataset_;
  std::shared_ptr<const WeakJudgePanel> panel_;
  SelectionState state_;
  std::unique_ptr<Strategy> strategy_;
  SessionStatus status_ = SessionStatus::kActive;
  std::uint64_t revision_ = 0;
  std::optional<QueryIndex> pending_;
};

namespace {

nlohmann::json PairsToObject(
    const std::vector<std::pair<std::string, double>>& pairs) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : pairs) out[k] = v;
  return out;
}

nlohmann::json ConfigToJson(const SessionConfig& c) {
  return {{"dataset_id", c.dataset_id},
          {"strategy", StrategyName(c.strategy)},
          {"eps_loss", c.eps_loss},
          {"eps_draw", c.eps_draw},
          {"z", c.judges},
          {"budget", c.budget},
          {"seed", c.seed}};
}

SessionConfig ConfigFromJson(const nlohmann::json& j) {
  SessionConfig c;
  c.dataset_id = j.at("dataset_id").get<std::string>();
  auto kind = ParseStrategyKind(j.at("strategy").get<std::string>());
  if (!kind) throw Error(ErrorKind::kParse, "unknown strategy in transcript");
  c.strategy = *kind;
  c.eps_loss = j.at("eps_loss").get<double>();
  c.eps_draw = j.at("eps_draw").get<double>();
  c.judges = j.at("z").get<int>();
  c.budget = j.at("budget").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

nlohmann::json ToJson(const StateSummary& s) {
  return {{"session_id", s.session_id},
          {"status", SessionStatusName(s.status)},
          {"t", s.t},
          {"budget", s.budget},
          {"budget_remaining", s.budget - s.t},
          {"revision", s.revision},
          {"posterior", PairsToObject(s.posterior)},
          {"entropy", s.entropy},
          {"leader", s.leader},
          {"pending_query", s.pending_query ? nlohmann::json(*s.pending_query)
                                            : nlohmann::json(nullptr)}};
}

nlohmann::json ToJson(const Proposal& p) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& [model, text] : p.candidate_responses) {
    candidates.push_back({{"model_id", model}, {"response", text}});
  }
  return {{"query_id", p.query_id},
          {"query_text", p.query_text},
          {"baseline_id", p.baseline_id},
          {"baseline_response", p.baseline_response},
          {"candidate_responses", candidates},
          {"budget_remaining", p.budget_remaining},
          {"revision", p.revision}};
}

nlohmann::json ToJson(const FinalResult& r, const Dataset& dataset) {
  nlohmann::json log = nlohmann::json::array();
  for (const JudgmentVector& v : r.annotations) {
    nlohmann::json outcomes = nlohmann::json::object();
    for (ModelIndex j = 0; j < v.outcomes.size(); ++j) {
      outcomes[dataset.model_id(j)] = OutcomeSymbol(v.outcomes[j]);
    }
    log.push_back({{"query_id", v.query_id}, {"outcomes", outcomes}});
  }
  return {{"selected_model", r.selected_model},
          {"win_rates", PairsToObject(r.win_rates)},
          {"posterior", PairsToObject(r.posterior)},
          {"annotations", log}};
}

nlohmann::json ToJson(const DatasetInfo& d) {
  return {{"id", d.id},
          {"n", d.num_queries},
          {"m", d.num_models},
          {"baseline", d.baseline}};
}

SessionManager::SessionManager(
    std::optional<std::filesystem::path> storage_dir)
    : storage_dir_(std::move(storage_dir)) {
  if (storage_dir_) std::filesystem::create_directories(*storage_dir_);
}

SessionManager::~SessionManager() = default;

void SessionManager::AddDataset(const std::string& id, Dataset dataset) {
  std::lock_guard<std::mutex> lock(mu_);
  if (datasets_.count(id)) {
    throw Error(ErrorKind::kConflict, "dataset already loaded: " + id);
  }
  datasets_.emplace(id, std::make_unique<LoadedDataset>(
                            LoadedDataset{std::move(dataset), {}}));
}

std::vector<DatasetInfo> SessionManager::Datasets() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<DatasetInfo> out;
  for (const auto& [id, loaded] : datasets_) {
    out.push_back({id, loaded->dataset.num_queries(),
                   loaded->dataset.num_models(),
                   loaded->dataset.baseline_id()});
  }
  return out;
}

std::shared_ptr<const WeakJudgePanel> SessionManager::PanelFor(
    const std::string& dataset_id, int judges) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = datasets_.find(dataset_id);
  if (it == datasets_.end()) {
    throw Error(ErrorKind::kNotFound, "unknown dataset: " + dataset_id);
  }
  auto& panels = it->second->panels;
  auto p = panels.find(judges);
  if (p != panels.end()) return p->second;
  auto panel = std::make_shared<const WeakJudgePanel>(
      BuildPanel(it->second->dataset, judges));
  panels.emplace(judges, panel);
  return panel;
}

std::shared_ptr<Session> SessionManager::Build(const std::string& id,
                                               const SessionConfig& config) {
  if (config.judges < 1) {
    throw Error(ErrorKind::kValidation, "z must be at least 1");
  }
  // Validates the parameters before any expensive work.
  NoiseParams params(config.eps_loss, config.eps_draw);
  (void)params;
  const Dataset* dataset = nullptr;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = datasets_.find(config.dataset_id);
    if (it == datasets_.end()) {
      throw Error(ErrorKind::kNotFound,
                  "unknown dataset: " + config.dataset_id);
    }
    dataset = &it->second->dataset;
  }
  if (config.budget == 0 || config.budget > dataset->num_queries()) {
    throw Error(ErrorKind::kValidation, "budget must be in [1, pool size]");
  }
  auto panel = PanelFor(config.dataset_id, config.judges);
  std::vector<QueryIndex> pool(dataset->num_queries());
  for (QueryIndex q = 0; q < pool.size(); ++q) pool[q] = q;
  return std::make_shared<Session>(id, config, *dataset, std::move(panel),
                                   std::move(pool));
}

void SessionManager::Append(const std::string& session_id,
                            const nlohmann::json& event) {
  if (!storage_dir_) return;
  std::ofstream out(*storage_dir_ / (session_id + ".jsonl"), std::ios::app);
  if (!out) {
    throw Error(ErrorKind::kInternal,
                "cannot append to transcript of " + session_id);
  }
  out << event.dump() << '\n';
  out.flush();
  if (!out) {
    throw Error(ErrorKind::kInternal,
                "cannot append to transcript of " + session_id);
  }
}

StateSummary SessionManager::CreateSession(const SessionConfig& config) {
  std::string id;
  {
    std::lock_guard<std::mutex> lock(mu_);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sess-%06llu",
                  static_cast<unsigned long long>(next_id_++));
    id = buf;
  }
  std::shared_ptr<Session> session = Build(id, config);
  Append(id, {{"type", "create"},
              {"session_id", id},
              {"config", ConfigToJson(config)}});
  {
    std::lock_guard<std::mutex> lock(mu_);
    sessions_.emplace(id, session);
  }
  std::lock_guard<std::mutex> lock(session->mu);
  return session->Summary();
}

std::shared_ptr<Session> SessionManager::Find(
    const std::string& session_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw Error(ErrorKind::kNotFound, "unknown session: " + session_id);
  }
  return it->second;
}

Proposal SessionManager::NextQuery(const std::string& session_id) {
  std::shared_ptr<Session> session = Find(session_id);
  std::lock_guard<std::mutex> lock(session->mu);
  const QueryIndex q = session->Propose();
  const Dataset& d = session->dataset();
  Proposal p;
  p.query_id = d.query(q).id;
  p.query_text = d.query(q).text;
  p.baseline_id = d.baseline_id();
  p.baseline_response = d.response(q, d.baseline());
  for (ModelIndex j = 0; j < d.num_models(); ++j) {
    if (j == d.baseline()) continue;
    p.candidate_responses.emplace_back(d.model_id(j), d.response(q, j));
  }
  p.budget_remaining = session->state().budget() - session->state().t();
  p.revision = session->revision();
  return p;
}

StateSummary SessionManager::SubmitJudgments(
    const std::string& session_id, const std::string& query_id,
    const std::vector<std::pair<std::string, Outcome>>& outcomes,
    std::uint64_t expected_revision) {
  std::shared_ptr<Session> session = Find(session_id);
  std::lock_guard<std::mutex> lock(session->mu);
  if (expected_revision != session->revision()) {
    throw Error(ErrorKind::kConflict,
                "stale revision " + std::to_string(expected_revision) +
                    ", current is " + std::to_string(session->revision()));
  }
  if (session->status() != SessionStatus::kActive) {
    throw Error(ErrorKind::kConflict,
                std::string("session is ") +
                    std::string(SessionStatusName(session->status())));
  }
  const Dataset& d = session->dataset();
  if (!session->pending() || d.query(*session->pending()).id != query_id) {
    throw Error(ErrorKind::kConflict,
                "query " + query_id + " is not the pending proposal");
  }
  JudgmentVector v;
  v.query_id = query_id;
  v.outcomes.assign(d.num_models(), Outcome::kDraw);
  std::vector<bool> seen(d.num_models(), false);
  for (const auto& [model, outcome] : outcomes) {
    auto j = d.FindModel(model);
    if (!j) throw Error(ErrorKind::kValidation, "unknown model: " + model);
    if (seen[*j]) {
      throw Error(ErrorKind::kValidation, "duplicate outcome for " + model);
    }
    if (*j == d.baseline() && outcome != Outcome::kDraw) {
      throw Error(ErrorKind::kValidation,
                  "the baseline's outcome against itself must be draw");
    }
    v.outcomes[*j] = outcome;
    seen[*j] = true;
  }
  for (ModelIndex j = 0; j < d.num_models(); ++j) {
    if (!seen[j] && j != d.baseline()) {
      throw Error(ErrorKind::kValidation,
                  "missing outcome for model " + d.model_id(j));
    }
  }
  nlohmann::json event_outcomes = nlohmann::json::object();
  for (ModelIndex j = 0; j < d.num_models(); ++j) {
    event_outcomes[d.model_id(j)] = OutcomeSymbol(v.outcomes[j]);
  }
  Append(session_id, {{"type", "judgment"},
                      {"query_id", query_id},
                      {"outcomes", event_outcomes}});
  session->Apply(*session->pending(), std::move(v));
  return session->Summary();
}

FinalResult SessionManager::Finalize(const std::string& session_id) {
  std::shared_ptr<Session> session = Find(session_id);
  std::lock_guard<std::mutex> lock(session->mu);
  if (session->status() == SessionStatus::kFinalized) {
    throw Error(ErrorKind::kFailedPrecondition, "session already finalized");
  }
  const SelectionState& state = session->state();
  if (state.annotations().empty()) {
    throw Error(ErrorKind::kFailedPrecondition,
                "cannot finalize without annotations");
  }
  Append(session_id, {{"type", "finalize"}});
  session->MarkFinalized();
  const Dataset& d = session->dataset();
  FinalResult r;
  r.selected_model = d.model_id(state.FinalModel());
  auto rates =
      AnnotatedWinRates(state.annotations(), d.num_models(), d.baseline());
  auto probs = state.posterior().Probabilities();
  for (ModelIndex j = 0; j < d.num_models(); ++j) {
    r.win_rates.emplace_back(d.model_id(j), rates[j]);
    r.posterior.emplace_back(d.model_id(j), probs[j]);
  }
  r.annotations = state.annotations().vectors();
  return r;
}

StateSummary SessionManager::GetState(const std::string& session_id) const {
  std::shared_ptr<Session> session = Find(session_id);
  std::lock_guard<std::mutex> lock(session->mu);
  return session->Summary();
}

const Dataset& SessionManager::DatasetFor(
    const std::string& session_id) const {
  return Find(session_id)->dataset();
}

std::size_t SessionManager::Recover() {
  if (!storage_dir_) return 0;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(*storage_dir_)) {
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t restored = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::string line;
    std::shared_ptr<Session> session;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json event;
      try {
        event = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kParse,
                    "corrupt transcript " + path.string() + ": " + e.what());
      }
      const std::string type = event.value("type", "");
      if (type == "create") {
        session = Build(event.at("session_id").get<std::string>(),
                        ConfigFromJson(event.at("config")));
      } else if (!session) {
        throw Error(ErrorKind::kParse,
                    "transcript does not start with create: " +
                        path.string());
      } else if (type == "judgment") {
        const QueryIndex q = session->Propose();
        const Dataset& d = session->dataset();
        if (d.query(q).id != event.at("query_id").get<std::string>()) {
          throw Error(ErrorKind::kInternal,
                      "transcript replay diverged in " + path.string());
        }
        JudgmentVector v;
        v.query_id = d.query(q).id;
        v.outcomes.assign(d.num_models(), Outcome::kDraw);
        for (auto it = event.at("outcomes").begin();
             it != event.at("outcomes").end(); ++it) {
          auto j = d.FindModel(it.key());
          auto o = ParseOutcomeSymbol(it.value().get<std::string>());
          if (!j || !o) {
            throw Error(ErrorKind::kParse,
                        "bad judgment in transcript " + path.string());
          }
          v.outcomes[*j] = *o;
        }
        session->Apply(q, std::move(v));
      } else if (type == "finalize") {
        session->MarkFinalized();
      }
    }
    if (!session) continue;
    std::lock_guard<std::mutex> lock(mu_);
    const std::string& id = session->id();
    unsigned long long n = 0;
    if (std::sscanf(id.c_str(), "sess-%llu", &n) == 1) {
      next_id_ = std::max<std::uint64_t>(next_id_, n + 1);
    }
    sessions_[id] = session;
    ++restored;
  }
  return restored;
}

}  // namespace actsel
