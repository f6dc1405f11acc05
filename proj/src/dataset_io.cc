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

#include "actsel/dataset_io.h"

#include <fstream>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "actsel/error.h"
#include "json.hpp"

namespace actsel {

namespace {

using Json = nlohmann::ordered_json;

std::string LinePrefix(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

// A string, or a list of turns joined with the turn separator.
std::string TextField(const Json& value, std::size_t line_no,
                      const std::string& what) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::vector<std::string> turns;
    for (const Json& t : value) {
      if (!t.is_string()) {
        throw Error(ErrorKind::kParse,
                    LinePrefix(line_no) + what + " turns must be strings");
      }
      turns.push_back(t.get<std::string>());
    }
    return JoinTurns(turns);
  }
  throw Error(ErrorKind::kParse, LinePrefix(line_no) + what +
                                     " must be a string or list of strings");
}

struct RawRecord {
  Query query;
  std::string baseline;
  std::vector<std::pair<std::string, std::string>> responses;
  bool has_oracle = false;
  std::vector<std::pair<std::string, std::string>> oracle;
  std::size_t line_no = 0;
};

RawRecord ParseRecord(const std::string& line, std::size_t line_no) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse,
                LinePrefix(line_no) + "malformed record: " + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorKind::kParse,
                LinePrefix(line_no) + "record must be an object");
  }
  RawRecord rec;
  rec.line_no = line_no;
  if (!j.contains("query_id") || !j["query_id"].is_string()) {
    throw Error(ErrorKind::kParse,
                LinePrefix(line_no) + "missing string field query_id");
  }
  rec.query.id = j["query_id"].get<std::string>();
  if (!j.contains("query_text")) {
    throw Error(ErrorKind::kParse,
                LinePrefix(line_no) + "missing field query_text");
  }
  rec.query.text = TextField(j["query_text"], line_no, "query_text");
  if (j.contains("baseline")) {
    if (!j["baseline"].is_string()) {
      throw Error(ErrorKind::kParse,
                  LinePrefix(line_no) + "baseline must be a string");
    }
    rec.baseline = j["baseline"].get<std::string>();
  }
  if (!j.contains("responses") || !j["responses"].is_object()) {
    throw Error(ErrorKind::kParse,
                LinePrefix(line_no) + "missing object field responses");
  }
  for (auto it = j["responses"].begin(); it != j["responses"].end(); ++it) {
    rec.responses.emplace_back(
        it.key(), TextField(it.value(), line_no, "response " + it.key()));
  }
  if (j.contains("oracle") && !j["oracle"].is_null()) {
    if (!j["oracle"].is_object()) {
      throw Error(ErrorKind::kParse,
                  LinePrefix(line_no) + "oracle must be an object");
    }
    rec.has_oracle = true;
    for (auto it = j["oracle"].begin(); it != j["oracle"].end(); ++it) {
      if (!it.value().is_string()) {
        throw Error(ErrorKind::kParse,
                    LinePrefix(line_no) + "oracle values must be strings");
      }
      rec.oracle.emplace_back(it.key(), it.value().get<std::string>());
    }
  }
  return rec;
}

}  // namespace

Dataset ParseDataset(std::istream& in, const std::string& baseline) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(ParseRecord(line, line_no));
  }
  if (records.empty()) {
    throw Error(ErrorKind::kValidation, "dataset has no records");
  }

  std::vector<std::string> model_ids;
  for (const auto& [model, text] : records.front().responses) {
    model_ids.push_back(model);
  }
  std::unordered_map<std::string, ModelIndex> model_index;
  for (ModelIndex j = 0; j < model_ids.size(); ++j) {
    model_index.emplace(model_ids[j], j);
  }
  if (model_ids.empty()) {
    throw Error(ErrorKind::kValidation, "first record lists no models");
  }

  std::string declared;
  for (const RawRecord& rec : records) {
    if (rec.baseline.empty()) continue;
    if (!declared.empty() && declared != rec.baseline) {
      throw Error(ErrorKind::kValidation,
                  "query " + rec.query.id + " declares baseline " +
                      rec.baseline + " but an earlier record declares " +
                      declared);
    }
    declared = rec.baseline;
  }
  const std::string chosen_baseline =
      !baseline.empty() ? baseline
                        : (!declared.empty() ? declared : model_ids.front());
  if (!model_index.count(chosen_baseline)) {
    throw Error(ErrorKind::kValidation,
                "baseline " + chosen_baseline + " is not one of the models");
  }
  const ModelIndex baseline_index = model_index.at(chosen_baseline);

  const bool replay = records.front().has_oracle;
  std::vector<Query> queries;
  std::vector<std::vector<std::string>> responses;
  std::vector<JudgmentVector> oracle;
  for (const RawRecord& rec : records) {
    std::vector<std::string> row(model_ids.size());
    std::vector<bool> seen(model_ids.size(), false);
    for (const auto& [model, text] : rec.responses) {
      auto it = model_index.find(model);
      if (it == model_index.end()) {
        throw Error(ErrorKind::kValidation,
                    "query " + rec.query.id + " has a response from model " +
                        model + " which the first record does not list");
      }
      row[it->second] = text;
      seen[it->second] = true;
    }
    for (ModelIndex j = 0; j < model_ids.size(); ++j) {
      if (!seen[j]) {
        throw Error(ErrorKind::kValidation, "query " + rec.query.id +
                                                " is missing the response of "
                                                "model " +
                                                model_ids[j]);
      }
    }
    if (rec.has_oracle != replay) {
      throw Error(ErrorKind::kValidation,
                  "query " + rec.query.id +
                      (replay ? " has no oracle judgments"
                              : " has oracle judgments but earlier records "
                                "do not"));
    }
    if (replay) {
      JudgmentVector v;
      v.query_id = rec.query.id;
      v.outcomes.assign(model_ids.size(), Outcome::kDraw);
      std::vector<bool> judged(model_ids.size(), false);
      for (const auto& [model, symbol] : rec.oracle) {
        auto it = model_index.find(model);
        if (it == model_index.end()) {
          throw Error(ErrorKind::kValidation,
                      "query " + rec.query.id + " judges unknown model " +
                          model);
        }
        auto outcome = ParseOutcomeSymbol(symbol);
        if (!outcome) {
          throw Error(ErrorKind::kParse,
                      LinePrefix(rec.line_no) + "unknown outcome symbol '" +
                          symbol + "' for model " + model);
        }
        v.outcomes[it->second] = *outcome;
        judged[it->second] = true;
      }
      for (ModelIndex j = 0; j < model_ids.size(); ++j) {
        if (!judged[j] && j != baseline_index) {
          throw Error(ErrorKind::kValidation,
                      "query " + rec.query.id +
                          " is missing the oracle judgment of model " +
                          model_ids[j]);
        }
      }
      oracle.push_back(std::move(v));
    }
    queries.push_back(rec.query);
    responses.push_back(std::move(row));
  }
  std::optional<std::vector<JudgmentVector>> maybe_oracle;
  if (replay) maybe_oracle = std::move(oracle);
  return Dataset(std::move(queries), std::move(model_ids), chosen_baseline,
                 std::move(responses), std::move(maybe_oracle));
}

Dataset LoadDataset(const std::filesystem::path& path,
                    const std::string& baseline) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kNotFound, "cannot open dataset: " + path.string());
  }
  return ParseDataset(in, baseline);
}

bool DeclaresBaseline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    try {
      Json j = Json::parse(line);
      if (j.is_object() && j.contains("baseline")) return true;
    } catch (const nlohmann::json::exception&) {
      return false;
    }
  }
  return false;
}

std::string SerializeDataset(const Dataset& dataset) {
  std::string out;
  for (QueryIndex q = 0; q < dataset.num_queries(); ++q) {
    Json rec;
    rec["query_id"] = dataset.query(q).id;
    rec["query_text"] = dataset.query(q).text;
    rec["baseline"] = dataset.baseline_id();
    Json responses = Json::object();
    for (ModelIndex j = 0; j < dataset.num_models(); ++j) {
      responses[dataset.model_id(j)] = dataset.response(q, j);
    }
    rec["responses"] = std::move(responses);
    if (dataset.has_oracle()) {
      Json oracle = Json::object();
      const JudgmentVector& v = (*dataset.oracle())[q];
      for (ModelIndex j = 0; j < dataset.num_models(); ++j) {
        oracle[dataset.model_id(j)] = std::string(OutcomeSymbol(v.outcomes[j]));
      }
      rec["oracle"] = std::move(oracle);
    }
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kInternal, "cannot write " + path.string());
  }
  out << SerializeDataset(dataset);
}

bool ValidationReport::ok() const { return errors() == 0; }

std::size_t ValidationReport::errors() const {
  std::size_t n = 0;
  for (const auto& i : issues) {
    n += i.severity == ValidationIssue::Severity::kError ? 1 : 0;
  }
  return n;
}

std::size_t ValidationReport::warnings() const {
  return issues.size() - errors();
}

ValidationReport ValidateDataset(const Dataset& dataset) {
  using Severity = ValidationIssue::Severity;
  ValidationReport report;
  std::unordered_set<std::string> ids;
  for (QueryIndex q = 0; q < dataset.num_queries(); ++q) {
    const Query& query = dataset.query(q);
    if (query.id.empty()) {
      report.issues.push_back(
          {Severity::kError, "", "", "empty query id at position " +
                                         std::to_string(q)});
    }
    if (!ids.insert(query.id).second) {
      report.issues.push_back(
          {Severity::kError, query.id, "", "duplicate query id"});
    }
    if (query.text.empty()) {
      report.issues.push_back(
          {Severity::kError, query.id, "", "empty query text"});
    }
    for (ModelIndex j = 0; j < dataset.num_models(); ++j) {
      if (dataset.response(q, j).find_first_not_of(" \t\r\n") ==
          std::string::npos) {
        report.issues.push_back({Severity::kWarning, query.id,
                                 dataset.model_id(j), "empty response"});
      }
    }
    if (dataset.has_oracle()) {
      const JudgmentVector& v = (*dataset.oracle())[q];
      if (v.outcomes[dataset.baseline()] != Outcome::kDraw) {
        report.issues.push_back(
            {Severity::kError, query.id, dataset.baseline_id(),
             "baseline oracle entry must be draw"});
      }
    }
  }
  if (dataset.num_models() < 2) {
    report.issues.push_back({Severity::kError, "", "",
                             "need at least two models to compare"});
  }
  return report;
}

std::string FormatReport(const ValidationReport& report) {
  std::ostringstream os;
  for (const ValidationIssue& i : report.issues) {
    os << (i.severity == ValidationIssue::Severity::kError ? "error"
                                                            : "warning");
    if (!i.query_id.empty()) os << " query=" << i.query_id;
    if (!i.model_id.empty()) os << " model=" << i.model_id;
    os << ": " << i.message << '\n';
  }
  os << report.errors() << " error(s), " << report.warnings()
     << " warning(s)\n";
  return os.str();
}

}  // namespace actsel
