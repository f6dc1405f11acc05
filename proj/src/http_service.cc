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

#include "actsel/http_service.h"

#include <string>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace actsel {
namespace {

using nlohmann::json;

std::string_view KindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid_argument";
    case ErrorKind::kNotFound:
      return "not_found";
    case ErrorKind::kConflict:
      return "conflict";
    case ErrorKind::kFailedPrecondition:
      return "state";
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kParse:
      return "parse";
    case ErrorKind::kInternal:
      return "internal";
  }
  return "internal";
}

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, ErrorKind kind,
                const std::string& message) {
  Reply(res, HttpStatusFor(kind),
        {{"error", {{"kind", KindName(kind)}, {"message", message}}}});
}

// Runs a handler and maps exceptions to error responses.
template <typename Fn>
void Guard(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    ReplyError(res, e.kind(), e.what());
  } catch (const json::exception& e) {
    ReplyError(res, ErrorKind::kParse, e.what());
  } catch (const std::exception& e) {
    ReplyError(res, ErrorKind::kInternal, e.what());
  }
}

json ParseBody(const httplib::Request& req) {
  json body = json::parse(req.body.empty() ? "{}" : req.body);
  if (!body.is_object()) {
    throw Error(ErrorKind::kParse, "request body must be a JSON object");
  }
  return body;
}

// Typed field access that reports wrong types as validation errors.
template <typename T>
T Field(const json& body, const char* name, T fallback) {
  auto it = body.find(name);
  if (it == body.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kValidation,
                std::string("field has the wrong type: ") + name);
  }
}

}  // namespace

int HttpStatusFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kConflict:
    case ErrorKind::kFailedPrecondition:
      return 409;
    case ErrorKind::kValidation:
    case ErrorKind::kInvalidArgument:
      return 422;
    case ErrorKind::kParse:
      return 400;
    case ErrorKind::kInternal:
      return 500;
  }
  return 500;
}

HttpService::HttpService(SessionManager& manager)
    : manager_(&manager), server_(std::make_unique<httplib::Server>()) {
  Routes();
}

HttpService::~HttpService() { Stop(); }

void HttpService::Routes() {
  httplib::Server& s = *server_;

  s.Get("/datasets", [this](const httplib::Request&, httplib::Response& res) {
    Guard(res, [&] {
      json out = json::array();
      for (const DatasetInfo& d : manager_->Datasets()) out.push_back(ToJson(d));
      Reply(res, 200, {{"datasets", out}});
    });
  });

  s.Post("/sessions", [this](const httplib::Request& req,
                             httplib::Response& res) {
    Guard(res, [&] {
      const json body = ParseBody(req);
      SessionConfig config;
      config.dataset_id = Field<std::string>(body, "dataset_id", "");
      if (config.dataset_id.empty()) {
        auto datasets = manager_->Datasets();
        if (datasets.size() != 1) {
          throw Error(ErrorKind::kValidation, "dataset_id is required");
        }
        config.dataset_id = datasets.front().id;
      }
      const std::string strategy =
          Field<std::string>(body, "strategy", "llm-selector");
      auto kind = ParseStrategyKind(strategy);
      if (!kind) {
        throw Error(ErrorKind::kValidation, "unknown strategy: " + strategy);
      }
      config.strategy = *kind;
      config.eps_loss = Field<double>(body, "eps_loss", config.eps_loss);
      config.eps_draw = Field<double>(body, "eps_draw", config.eps_draw);
      config.judges = Field<int>(body, "z", config.judges);
      const long long budget = Field<long long>(body, "budget", 0);
      if (budget <= 0) {
        throw Error(ErrorKind::kValidation, "budget must be positive");
      }
      config.budget = static_cast<std::size_t>(budget);
      config.seed = Field<std::uint64_t>(body, "seed", 0);
      Reply(res, 201, ToJson(manager_->CreateSession(config)));
    });
  });

  s.Get(R"(/sessions/([^/]+))",
        [this](const httplib::Request& req, httplib::Response& res) {
          Guard(res, [&] {
            Reply(res, 200, ToJson(manager_->GetState(req.matches[1])));
          });
        });

  s.Get(R"(/sessions/([^/]+)/next)",
        [this](const httplib::Request& req, httplib::Response& res) {
          Guard(res, [&] {
            Reply(res, 200, ToJson(manager_->NextQuery(req.matches[1])));
          });
        });

  s.Post(R"(/sessions/([^/]+)/judgments)",
         [this](const httplib::Request& req, httplib::Response& res) {
           Guard(res, [&] {
             const json body = ParseBody(req);
             const std::string query_id =
                 Field<std::string>(body, "query_id", "");
             if (query_id.empty()) {
               throw Error(ErrorKind::kValidation, "query_id is required");
             }
             if (!body.contains("revision")) {
               throw Error(ErrorKind::kValidation, "revision is required");
             }
             const auto revision = Field<std::uint64_t>(body, "revision", 0);
             auto it = body.find("outcomes");
             if (it == body.end() || !it->is_object()) {
               throw Error(ErrorKind::kValidation,
                           "outcomes must map model ids to win|draw|loss");
             }
             std::vector<std::pair<std::string, Outcome>> outcomes;
             for (auto o = it->begin(); o != it->end(); ++o) {
               std::optional<Outcome> parsed;
               if (o.value().is_string()) {
                 parsed = ParseOutcomeSymbol(o.value().get<std::string>());
               }
               if (!parsed) {
                 throw Error(ErrorKind::kValidation,
                             "bad outcome for model " + o.key());
               }
               outcomes.emplace_back(o.key(), *parsed);
             }
             Reply(res, 200,
                   ToJson(manager_->SubmitJudgments(req.matches[1], query_id,
                                                    outcomes, revision)));
           });
         });

  s.Post(R"(/sessions/([^/]+)/finalize)",
         [this](const httplib::Request& req, httplib::Response& res) {
           Guard(res, [&] {
             const std::string id = req.matches[1];
             FinalResult r = manager_->Finalize(id);
             Reply(res, 200, ToJson(r, manager_->DatasetFor(id)));
           });
         });
}

int HttpService::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw Error(ErrorKind::kInternal,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpService::Wait() {
  if (thread_.joinable()) thread_.join();
}

void HttpService::Stop() {
  if (server_) server_->stop();
  Wait();
}

}  // namespace actsel
