// Copyright 2026 The CampusFL Authors
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

#include "campusfl/orchestrator/admin_server.h"

#include <string>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"
#include "campusfl/protocol/codec.h"
#include "httplib.h"

namespace campusfl {
namespace {

using nlohmann::json;

void Reply(httplib::Response& res, int code, const json& body) {
  res.status = code;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, const absl::Status& status) {
  std::string kind = ErrorKind(status);
  if (kind.empty()) kind = "Internal";
  Reply(res, HttpStatusFor(status),
        {{"error", kind}, {"detail", std::string(status.message())}});
}

absl::StatusOr<json> ParseBody(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    return MakeError(absl::StatusCode::kInvalidArgument, "BadJson", e.what());
  }
}

json ModelDetail(const RegistryEntry& entry) {
  json doc = RegistryEntryToJson(entry);
  doc.erase("source");
  return doc;
}

}  // namespace

int HttpStatusFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kAlreadyExists:
      return 409;
    case absl::StatusCode::kResourceExhausted:
    case absl::StatusCode::kUnavailable:
      return 503;
    default:
      return 500;
  }
}

AdminServer::AdminServer(Orchestrator* orchestrator)
    : orch_(orchestrator), http_(std::make_unique<httplib::Server>()) {
  Routes();
}

AdminServer::~AdminServer() { Stop(); }

void AdminServer::Routes() {
  httplib::Server& http = *http_;
  // The console is served from a different origin.
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  http.Options(R"(/api/.*)", [](const httplib::Request&,
                                httplib::Response& res) { res.status = 204; });

  http.Get("/api/health", [this](const httplib::Request&,
                                 httplib::Response& res) {
    Reply(res, 200, {{"status", "ok"}, {"live_sessions", orch_->LiveSessions()}});
  });

  http.Get("/api/models", [this](const httplib::Request&,
                                 httplib::Response& res) {
    json list = json::array();
    for (const RegistryEntry& e : orch_->ListModels()) {
      list.push_back(RegistryEntrySummary(e));
    }
    Reply(res, 200, list);
  });

  http.Post("/api/models", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    auto reg = orch_->RegisterModel(req.body);
    if (!reg.ok()) return ReplyError(res, reg.status());
    json body = RegistryEntrySummary(reg->entry);
    body["duplicate"] = reg->duplicate;
    Reply(res, reg->duplicate ? 200 : 201, body);
  });

  auto get_model = [this](const httplib::Request& req,
                          httplib::Response& res) {
    int64_t version = 0;
    auto v = req.path_params.find("version");
    if (v != req.path_params.end() &&
        (!absl::SimpleAtoi(v->second, &version) || version < 1)) {
      return ReplyError(res, MakeError(absl::StatusCode::kInvalidArgument,
                                       "InvalidVersion", v->second));
    }
    auto entry = orch_->GetModel(req.path_params.at("id"), version);
    if (!entry.ok()) return ReplyError(res, entry.status());
    Reply(res, 200, ModelDetail(*entry));
  };
  http.Get("/api/models/:id", get_model);
  http.Get("/api/models/:id/:version", get_model);

  http.Post("/api/sessions", [this](const httplib::Request& req,
                                    httplib::Response& res) {
    auto body = ParseBody(req);
    if (!body.ok()) return ReplyError(res, body.status());
    auto cfg = SessionConfigFromJson(*body, /*allow_port=*/false);
    if (!cfg.ok()) return ReplyError(res, cfg.status());
    auto created = orch_->CreateSession(*std::move(cfg));
    if (!created.ok()) return ReplyError(res, created.status());
    Reply(res, 201, SessionConfigToJson(*created));
  });

  http.Get("/api/sessions", [this](const httplib::Request&,
                                   httplib::Response& res) {
    json list = json::array();
    for (const SessionView& view : orch_->ListSessions()) {
      list.push_back(SessionViewToJson(view));
    }
    Reply(res, 200, list);
  });

  http.Get("/api/sessions/:id", [this](const httplib::Request& req,
                                       httplib::Response& res) {
    auto view = orch_->GetSession(req.path_params.at("id"));
    if (!view.ok()) return ReplyError(res, view.status());
    json body = SessionViewToJson(*view);
    body["config"] = SessionConfigToJson(view->config);
    Reply(res, 200, body);
  });

  http.Post("/api/sessions/:id/stop", [this](const httplib::Request& req,
                                             httplib::Response& res) {
    const std::string& id = req.path_params.at("id");
    if (auto s = orch_->StopSession(id); !s.ok()) return ReplyError(res, s);
    auto view = orch_->GetSession(id);
    if (!view.ok()) return ReplyError(res, view.status());
    Reply(res, 200, SessionViewToJson(*view));
  });

  http.Get("/api/sessions/:id/rounds", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    auto rounds = orch_->Rounds(req.path_params.at("id"));
    if (!rounds.ok()) return ReplyError(res, rounds.status());
    json list = json::array();
    for (const RoundRecord& r : *rounds) list.push_back(RoundRecordToJson(r));
    Reply(res, 200, list);
  });

  http.Get("/api/queries/:id/result", [this](const httplib::Request& req,
                                             httplib::Response& res) {
    auto result = orch_->QueryResult(req.path_params.at("id"));
    if (!result.ok()) return ReplyError(res, result.status());
    Reply(res, 200, *result);
  });

  http.Post("/api/tasks", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    auto body = ParseBody(req);
    if (!body.ok()) return ReplyError(res, body.status());
    auto request = PayloadFromJson("TaskRequest", *body);
    if (!request.ok()) return ReplyError(res, request.status());
    const TaskManifest manifest =
        orch_->ListTasks(std::get<TaskRequest>(*request));
    Reply(res, 200, PayloadToJson(manifest));
  });
}

absl::StatusOr<int> AdminServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = http_->bind_to_any_port(host);
  } else if (!http_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    return MakeError(absl::StatusCode::kUnavailable, "BindFailed",
                     absl::StrCat(host, ":", port));
  }
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return bound;
}

absl::Status AdminServer::Run(const std::string& host, int port) {
  if (!http_->bind_to_port(host, port)) {
    return MakeError(absl::StatusCode::kUnavailable, "BindFailed",
                     absl::StrCat(host, ":", port));
  }
  http_->listen_after_bind();
  return absl::OkStatus();
}

void AdminServer::Stop() {
  http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace campusfl
