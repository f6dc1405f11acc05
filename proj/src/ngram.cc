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

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "actsel/error.h"
#include "actsel/parallel.h"
#include "json.hpp"

namespace actsel {

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::size_t KGramModel::KeyHash::operator()(
    const std::vector<std::uint32_t>& key) const {
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint32_t v : key) {
    h ^= v;
    h *= 1099511628211ull;
  }
  h ^= key.size();
  return static_cast<std::size_t>(h * 0x9e3779b97f4a7c15ull);
}

KGramModel KGramModel::Fit(std::span<const std::vector<std::string>> corpus,
                           int order) {
  if (order < 1) {
    throw Error(ErrorKind::kInvalidArgument, "k-gram order must be >= 1");
  }
  KGramModel model;
  model.order_ = order;
  std::vector<std::uint32_t> ids;
  std::vector<std::uint32_t> key;
  for (const auto& tokens : corpus) {
    ids.clear();
    for (const std::string& token : tokens) {
      auto [it, inserted] = model.vocabulary_.try_emplace(
          token, static_cast<std::uint32_t>(model.vocabulary_.size()));
      ids.push_back(it->second);
    }
    model.total_tokens_ += ids.size();
    for (std::size_t l = 0; l < ids.size(); ++l) {
      const std::size_t max_context =
          std::min<std::size_t>(static_cast<std::size_t>(order - 1), l);
      for (std::size_t c = 0; c <= max_context; ++c) {
        key.assign(ids.begin() + static_cast<std::ptrdiff_t>(l - c),
                   ids.begin() + static_cast<std::ptrdiff_t>(l));
        ++model.context_counts_[key];
        key.push_back(ids[l]);
        ++model.event_counts_[key];
      }
    }
  }
  return model;
}

bool KGramModel::Encode(std::span<const std::string> tokens,
                        std::vector<std::uint32_t>* ids) const {
  ids->clear();
  for (const std::string& token : tokens) {
    auto it = vocabulary_.find(token);
    if (it == vocabulary_.end()) return false;
    ids->push_back(it->second);
  }
  return true;
}

double KGramModel::Probability(std::span<const std::string> context,
                               std::string_view token) const {
  if (context.size() >= static_cast<std::size_t>(order_)) {
    throw Error(ErrorKind::kInvalidArgument,
                "context longer than order - 1");
  }
  std::vector<std::uint32_t> key;
  if (!Encode(context, &key)) return 0.0;
  auto ctx = context_counts_.find(key);
  if (ctx == context_counts_.end()) return 0.0;
  auto tok = vocabulary_.find(std::string(token));
  if (tok == vocabulary_.end()) return 0.0;
  key.push_back(tok->second);
  auto ev = event_counts_.find(key);
  if (ev == event_counts_.end()) return 0.0;
  return static_cast<double>(ev->second) / static_cast<double>(ctx->second);
}

double KGramModel::AverageLikelihood(std::span<const std::string> tokens,
                                     int order) const {
  if (order < 1 || order > order_) {
    throw Error(ErrorKind::kInvalidArgument,
                "scoring order outside the fitted range");
  }
  if (tokens.empty()) return 0.0;
  std::vector<std::uint32_t> ids;
  if (empty() || !Encode(tokens, &ids)) {
    throw Error(ErrorKind::kInvalidArgument, "response not in fitted corpus");
  }
  std::vector<std::uint32_t> key;
  double sum = 0.0;
  for (std::size_t l = 0; l < ids.size(); ++l) {
    const std::size_t c =
        std::min<std::size_t>(static_cast<std::size_t>(order - 1), l);
    key.assign(ids.begin() + static_cast<std::ptrdiff_t>(l - c),
               ids.begin() + static_cast<std::ptrdiff_t>(l));
    auto ctx = context_counts_.find(key);
    key.push_back(ids[l]);
    auto ev = event_counts_.find(key);
    if (ctx == context_counts_.end() || ev == event_counts_.end()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "response not in fitted corpus");
    }
    sum += static_cast<double>(ev->second) / static_cast<double>(ctx->second);
  }
  return sum / static_cast<double>(ids.size());
}

Outcome CompareLikelihoods(double candidate, double baseline) {
  if (std::fabs(candidate - baseline) <= kLikelihoodDrawTolerance) {
    return Outcome::kDraw;
  }
  return candidate > baseline ? Outcome::kWin : Outcome::kLoss;
}

LikelihoodTable LikelihoodTable::Build(const Dataset& dataset, int max_order,
                                       unsigned threads) {
  if (max_order < 1) {
    throw Error(ErrorKind::kInvalidArgument, "judge count must be >= 1");
  }
  LikelihoodTable table;
  table.num_queries_ = dataset.num_queries();
  table.num_models_ = dataset.num_models();
  table.max_order_ = max_order;
  table.values_.assign(table.num_queries_ * table.num_models_ *
                           static_cast<std::size_t>(max_order),
                       0.0);
  ParallelFor(table.num_queries_, threads, [&](std::size_t q) {
    std::vector<std::vector<std::string>> corpus;
    corpus.reserve(table.num_models_);
    for (ModelIndex j = 0; j < table.num_models_; ++j) {
      corpus.push_back(Tokenize(dataset.response(q, j)));
    }
    KGramModel model = KGramModel::Fit(corpus, max_order);
    for (ModelIndex j = 0; j < table.num_models_; ++j) {
      for (int k = 1; k <= max_order; ++k) {
        table.values_[(q * table.num_models_ + j) * max_order + (k - 1)] =
            model.AverageLikelihood(corpus[j], k);
      }
    }
  });
  return table;
}

double EnsembleNu(std::span<const Outcome> decisions) {
  return WinRate(decisions);
}

Outcome EnsembleOutcome(std::span<const Outcome> decisions) {
  if (decisions.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no judgments");
  }
  long half_points = 0;
  for (Outcome o : decisions) half_points += OutcomeHalfPoints(o);
  // nu = half_points / (2z); nu >= 2/3 <=> 3 * half_points >= 4z.
  const long z = static_cast<long>(decisions.size());
  if (3 * half_points >= 4 * z) return Outcome::kWin;
  if (3 * half_points >= 2 * z) return Outcome::kDraw;
  return Outcome::kLoss;
}

WeakJudgePanel WeakJudgePanel::Build(const LikelihoodTable& table,
                                     ModelIndex baseline, int judges) {
  if (judges < 1 || judges > table.max_order()) {
    throw Error(ErrorKind::kInvalidArgument,
                "judge count exceeds the likelihood table's order");
  }
  if (baseline >= table.num_models()) {
    throw Error(ErrorKind::kInvalidArgument, "baseline index out of range");
  }
  const std::size_t n = table.num_queries();
  const std::size_t m = table.num_models();
  std::vector<Outcome> decisions(n * m * static_cast<std::size_t>(judges));
  for (QueryIndex q = 0; q < n; ++q) {
    for (int k = 1; k <= judges; ++k) {
      const double base = table.at(q, baseline, k);
      for (ModelIndex j = 0; j < m; ++j) {
        decisions[(q * judges + (k - 1)) * m + j] =
            CompareLikelihoods(table.at(q, j, k), base);
      }
    }
  }
  return FromDecisions(n, m, baseline, judges, std::move(decisions));
}

WeakJudgePanel WeakJudgePanel::FromDecisions(std::size_t num_queries,
                                             std::size_t num_models,
                                             ModelIndex baseline, int judges,
                                             std::vector<Outcome> decisions) {
  if (judges < 1) {
    throw Error(ErrorKind::kInvalidArgument, "judge count must be >= 1");
  }
  if (baseline >= num_models) {
    throw Error(ErrorKind::kInvalidArgument, "baseline index out of range");
  }
  if (decisions.size() !=
      num_queries * num_models * static_cast<std::size_t>(judges)) {
    throw Error(ErrorKind::kInvalidArgument,
                "decision array has the wrong size");
  }
  WeakJudgePanel panel;
  panel.num_queries_ = num_queries;
  panel.num_models_ = num_models;
  panel.baseline_ = baseline;
  panel.judges_ = judges;
  panel.decisions_ = std::move(decisions);
  for (QueryIndex q = 0; q < num_queries; ++q) {
    for (int k = 1; k <= judges; ++k) {
      panel.decisions_[panel.Offset(q, k) + baseline] = Outcome::kDraw;
    }
  }
  return panel;
}

std::vector<Outcome> WeakJudgePanel::ModelDecisions(QueryIndex q,
                                                    ModelIndex j) const {
  std::vector<Outcome> out;
  out.reserve(static_cast<std::size_t>(judges_));
  for (int k = 1; k <= judges_; ++k) out.push_back(Decision(q, j, k));
  return out;
}

double WeakJudgePanel::Nu(QueryIndex q, ModelIndex j) const {
  return EnsembleNu(ModelDecisions(q, j));
}

Outcome WeakJudgePanel::Ensemble(QueryIndex q, ModelIndex j) const {
  return EnsembleOutcome(ModelDecisions(q, j));
}

WeakJudgePanel BuildPanel(const Dataset& dataset, int judges,
                          unsigned threads) {
  LikelihoodTable table = LikelihoodTable::Build(dataset, judges, threads);
  return WeakJudgePanel::Build(table, dataset.baseline(), judges);
}

namespace {

class Fnv1a {
 public:
  void Add(std::string_view s) {
    for (unsigned char c : s) Mix(c);
    // Length suffix keeps ("ab", "c") distinct from ("a", "bc").
    std::uint64_t len = s.size();
    for (int i = 0; i < 8; ++i) Mix(static_cast<unsigned char>(len >> (8 * i)));
  }
  std::uint64_t value() const { return h_; }

 private:
  void Mix(unsigned char c) {
    h_ ^= c;
    h_ *= 1099511628211ull;
  }
  std::uint64_t h_ = 1469598103934665603ull;
};

std::string HexHash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::uint64_t DatasetContentHash(const Dataset& dataset) {
  Fnv1a h;
  h.Add("actsel-dataset-v1");
  for (const std::string& id : dataset.model_ids()) h.Add(id);
  h.Add(dataset.baseline_id());
  for (QueryIndex q = 0; q < dataset.num_queries(); ++q) {
    h.Add(dataset.query(q).id);
    h.Add(dataset.query(q).text);
    for (ModelIndex j = 0; j < dataset.num_models(); ++j) {
      h.Add(dataset.response(q, j));
    }
  }
  return h.value();
}

void SavePanelCache(const std::filesystem::path& path, const Dataset& dataset,
                    const WeakJudgePanel& panel) {
  if (panel.num_queries() != dataset.num_queries() ||
      panel.num_models() != dataset.num_models()) {
    throw Error(ErrorKind::kInvalidArgument,
                "panel does not match the dataset");
  }
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kInternal,
                "cannot open panel cache for writing: " + path.string());
  }
  nlohmann::json header = {
      {"format", "actsel-panel"},
      {"version", 1},
      {"content_hash", HexHash(DatasetContentHash(dataset))},
      {"judges", panel.judges()},
      {"queries", panel.num_queries()},
      {"models", panel.num_models()},
      {"baseline", dataset.baseline_id()},
  };
  out << header.dump() << '\n';
  for (QueryIndex q = 0; q < dataset.num_queries(); ++q) {
    for (ModelIndex j = 0; j < dataset.num_models(); ++j) {
      std::string codes;
      for (int k = 1; k <= panel.judges(); ++k) {
        codes.push_back(OutcomeCode(panel.Decision(q, j, k)));
      }
      nlohmann::json line = {{"query_id", dataset.query(q).id},
                             {"model_id", dataset.model_id(j)},
                             {"decisions", codes}};
      out << line.dump() << '\n';
    }
  }
}

WeakJudgePanel LoadPanelCache(const std::filesystem::path& path,
                              const Dataset& dataset) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kNotFound,
                "cannot open panel cache: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kParse, "panel cache is empty");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse,
                std::string("malformed panel cache header: ") + e.what());
  }
  if (header.value("format", "") != "actsel-panel" ||
      header.value("version", 0) != 1) {
    throw Error(ErrorKind::kParse, "not an actsel panel cache");
  }
  if (header.value("content_hash", "") !=
      HexHash(DatasetContentHash(dataset))) {
    throw Error(ErrorKind::kFailedPrecondition,
                "panel cache is stale for this dataset");
  }
  const int judges = header.value("judges", 0);
  const std::size_t n = dataset.num_queries();
  const std::size_t m = dataset.num_models();
  if (judges < 1) throw Error(ErrorKind::kParse, "bad judge count in cache");
  std::vector<Outcome> decisions(n * m * static_cast<std::size_t>(judges),
                                 Outcome::kDraw);
  std::vector<bool> seen(n * m, false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json rec = nlohmann::json::parse(line);
      auto q = dataset.FindQuery(rec.at("query_id").get<std::string>());
      auto j = dataset.FindModel(rec.at("model_id").get<std::string>());
      const std::string codes = rec.at("decisions").get<std::string>();
      if (!q || !j || codes.size() != static_cast<std::size_t>(judges)) {
        throw Error(ErrorKind::kParse, "unknown key or bad decision string");
      }
      for (int k = 1; k <= judges; ++k) {
        auto o = ParseOutcomeCode(codes[static_cast<std::size_t>(k - 1)]);
        if (!o) throw Error(ErrorKind::kParse, "bad decision code");
        decisions[(*q * judges + (k - 1)) * m + *j] = *o;
      }
      seen[*q * m + *j] = true;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParse, "panel cache line " +
                                         std::to_string(line_no) + ": " +
                                         e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, "panel cache line " +
                                         std::to_string(line_no) + ": " +
                                         e.what());
    }
  }
  for (bool s : seen) {
    if (!s) throw Error(ErrorKind::kParse, "panel cache is incomplete");
  }
  return WeakJudgePanel::FromDecisions(n, m, dataset.baseline(), judges,
                                       std::move(decisions));
}

}  // namespace actsel
