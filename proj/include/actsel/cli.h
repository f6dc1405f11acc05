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

// Command-line front end: validate, panel, calibrate, simulate, select and
// serve. Exit status 0 on success, 1 on usage errors, 2 on validation or
// parse failures and 3 on runtime errors.

#ifndef ACTSEL_CLI_H_
#define ACTSEL_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace actsel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

// `args` excludes the program name. In `select --live` mode proposals are
// written to `out` and judgments read from `in`, one JSON object per line.
int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace actsel

#endif  // ACTSEL_CLI_H_
