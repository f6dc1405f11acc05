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

// JSON-over-HTTP front end for SessionManager.
//
//   GET  /datasets
//   POST /sessions                      -> 201, state summary
//   GET  /sessions/{id}                 -> state summary
//   GET  /sessions/{id}/next            -> proposal (pinned until answered)
//   POST /sessions/{id}/judgments       -> state summary
//   POST /sessions/{id}/finalize        -> final result
//
// Errors are {"error": {"kind": ..., "message": ...}} with 400 for malformed
// bodies, 404 for unknown ids, 409 for conflicts and state errors, 422 for
// validation failures.

#ifndef ACTSEL_HTTP_SERVICE_H_
#define ACTSEL_HTTP_SERVICE_H_

#include <memory>
#include <string>
#include <thread>

#include "actsel/error.h"
#include "actsel/session.h"

namespace httplib {
class Server;
}

namespace actsel {

int HttpStatusFor(ErrorKind kind);

class HttpService {
 public:
  explicit HttpService(SessionManager& manager);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port; throws Error(kInternal) if binding fails.
  int Start(const std::string& host, int port);
  // Blocks until the server stops.
  void Wait();
  void Stop();

 private:
  void Routes();

  SessionManager* manager_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace actsel

#endif  // ACTSEL_HTTP_SERVICE_H_
