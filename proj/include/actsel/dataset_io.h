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

// Line-delimited dataset files: one JSON record per query.
//
//   {"query_id": "q1",
//    "query_text": "..." | ["turn 1", "turn 2"],
//    "baseline": "model-a",                      (optional)
//    "responses": {"model-a": "...", "model-b": "..." | [...]},
//    "oracle": {"model-b": "win" | "draw" | "loss", ...}}   (optional)
//
// The model universe and its order come from the first record. Multi-turn
// texts are flattened with kTurnSeparator.

#ifndef ACTSEL_DATASET_IO_H_
#define ACTSEL_DATASET_IO_H_

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "actsel/core.h"

namespace actsel {

// Parses records from a stream. `baseline` overrides any baseline declared
// in the records; when both are absent the first model is used. Throws
// Error(kParse) with the line number on malformed input and
// Error(kValidation) naming the query (and model) on inconsistent records.
Dataset ParseDataset(std::istream& in, const std::string& baseline = "");
Dataset LoadDataset(const std::filesystem::path& path,
                    const std::string& baseline = "");

// True if any record of the file declares a baseline. Used by the CLI to
// decide between the declared baseline and auto-selection.
bool DeclaresBaseline(const std::filesystem::path& path);

std::string SerializeDataset(const Dataset& dataset);
void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);

struct ValidationIssue {
  enum class Severity { kWarning, kError };
  Severity severity = Severity::kError;
  std::string query_id;
  std::string model_id;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const;
  std::size_t errors() const;
  std::size_t warnings() const;
};

// Duplicate query ids, empty query texts and non-draw baseline oracle
// entries are hard violations; empty responses are warnings.
ValidationReport ValidateDataset(const Dataset& dataset);

std::string FormatReport(const ValidationReport& report);

}  // namespace actsel

#endif  // ACTSEL_DATASET_IO_H_
