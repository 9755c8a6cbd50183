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

#include "campusfl/orchestrator/session_config.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {
namespace {

using nlohmann::json;

absl::Status InvalidConfig(const std::string& detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "InvalidConfig", detail);
}

}  // namespace

std::string_view SessionKindName(SessionKind kind) {
  return kind == SessionKind::kFl ? "FL" : "FA";
}

json SessionConfigToJson(const SessionConfig& cfg) {
  json doc = {{"session_id", cfg.session_id},
              {"kind", SessionKindName(cfg.kind)},
              {"rounds", cfg.rounds},
              {"min_clients", cfg.min_clients},
              {"target_clients", cfg.target_clients ? json(*cfg.target_clients)
                                                    : json(nullptr)},
              {"client_fraction", cfg.client_fraction},
              {"round_timeout_ms", cfg.round_timeout_ms},
              {"join_timeout_ms", cfg.join_timeout_ms},
              {"seed", cfg.seed},
              {"port", cfg.port}};
  if (cfg.kind == SessionKind::kFl) {
    doc["workload"] = cfg.workload;
    doc["model_id"] = cfg.model_id;
    doc["model_version"] = cfg.model_version;
    doc["hyperparams"] = HyperparamsToJson(cfg.hyperparams);
    doc["dp"] = DpConfigToJson(cfg.dp);
  } else {
    doc["query"] = cfg.query ? QueryToJson(*cfg.query) : json(nullptr);
  }
  return doc;
}

absl::StatusOr<SessionConfig> SessionConfigFromJson(const json& doc,
                                                    bool allow_port) {
  if (!doc.is_object()) return InvalidConfig("session config must be an object");
  static const std::set<std::string> kKnown = {
      "session_id",    "kind",          "workload",         "model_id",
      "model_version", "hyperparams",   "dp",               "query",
      "rounds",        "min_clients",   "target_clients",   "client_fraction",
      "round_timeout_ms", "join_timeout_ms", "seed",        "port"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.count(key)) {
      return InvalidConfig(absl::StrCat("unknown field '", key, "'"));
    }
  }
  if (doc.contains("port") && !allow_port) {
    return InvalidConfig("port is assigned by the server");
  }
  SessionConfig cfg;
  try {
    if (doc.contains("session_id")) {
      cfg.session_id = doc.at("session_id").get<std::string>();
    }
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "FL") {
      cfg.kind = SessionKind::kFl;
    } else if (kind == "FA") {
      cfg.kind = SessionKind::kFa;
    } else {
      return InvalidConfig(absl::StrCat("unknown kind '", kind, "'"));
    }
    auto int_field = [&doc](const char* key, auto& out) {
      if (!doc.contains(key)) return;
      const json& v = doc.at(key);
      if (!v.is_number_integer()) {
        throw std::invalid_argument(absl::StrCat(key, " must be an integer"));
      }
      out = v.get<std::decay_t<decltype(out)>>();
    };
    int_field("rounds", cfg.rounds);
    int_field("min_clients", cfg.min_clients);
    if (doc.contains("target_clients") && !doc.at("target_clients").is_null()) {
      int target = 0;
      int_field("target_clients", target);
      cfg.target_clients = target;
    }
    int_field("round_timeout_ms", cfg.round_timeout_ms);
    int_field("join_timeout_ms", cfg.join_timeout_ms);
    int_field("seed", cfg.seed);
    int_field("port", cfg.port);
    if (doc.contains("client_fraction")) {
      cfg.client_fraction = doc.at("client_fraction").get<double>();
    }
    if (cfg.kind == SessionKind::kFl) {
      if (doc.contains("query") && !doc.at("query").is_null()) {
        return InvalidConfig("FL sessions take no query");
      }
      if (doc.contains("workload")) {
        cfg.workload = doc.at("workload").get<std::string>();
      }
      cfg.model_id = doc.at("model_id").get<std::string>();
      int_field("model_version", cfg.model_version);
      if (doc.contains("hyperparams")) {
        auto hp = HyperparamsFromJson(doc.at("hyperparams"));
        if (!hp.ok()) return InvalidConfig(std::string(hp.status().message()));
        cfg.hyperparams = *hp;
      }
      if (doc.contains("dp")) {
        auto dp = DpConfigFromJson(doc.at("dp"));
        if (!dp.ok()) return InvalidConfig(std::string(dp.status().message()));
        cfg.dp = *dp;
      }
    } else {
      for (const char* key : {"workload", "model_id", "model_version",
                              "hyperparams", "dp"}) {
        if (doc.contains(key)) {
          return InvalidConfig(absl::StrCat("FA sessions take no ", key));
        }
      }
      auto query = QueryFromJson(doc.at("query"));
      if (!query.ok()) return InvalidConfig(std::string(query.status().message()));
      cfg.query = *query;
    }
  } catch (const json::exception& e) {
    return InvalidConfig(e.what());
  } catch (const std::invalid_argument& e) {
    return InvalidConfig(e.what());
  }
  CAMPUSFL_RETURN_IF_ERROR(ValidateSessionConfig(cfg));
  return cfg;
}

absl::Status ValidateSessionConfig(const SessionConfig& cfg) {
  if (cfg.rounds < 1) return InvalidConfig("rounds must be >= 1");
  if (cfg.kind == SessionKind::kFa && cfg.rounds != 1) {
    return InvalidConfig("FA sessions run exactly one round");
  }
  if (cfg.min_clients < 1) return InvalidConfig("min_clients must be >= 1");
  if (cfg.effective_target() < cfg.min_clients) {
    return InvalidConfig("target_clients must be >= min_clients");
  }
  if (!(cfg.client_fraction > 0 && cfg.client_fraction <= 1)) {
    return InvalidConfig("client_fraction must be in (0, 1]");
  }
  if (cfg.round_timeout_ms < 1 || cfg.join_timeout_ms < 1) {
    return InvalidConfig("timeouts must be positive");
  }
  if (cfg.kind == SessionKind::kFl) {
    if (cfg.model_id.empty()) return InvalidConfig("FL sessions need model_id");
    if (cfg.model_version < 0) return InvalidConfig("negative model_version");
    if (cfg.workload != "sleep" && cfg.workload != "activity") {
      return InvalidConfig(absl::StrCat("unknown workload '", cfg.workload, "'"));
    }
    if (auto s = ValidateHyperparams(cfg.hyperparams); !s.ok()) {
      return InvalidConfig(std::string(s.message()));
    }
    if (auto s = ValidateDpConfig(cfg.dp); !s.ok()) {
      return InvalidConfig(std::string(s.message()));
    }
  } else {
    if (!cfg.query.has_value()) return InvalidConfig("FA sessions need a query");
    if (auto s = ValidateQuery(*cfg.query); !s.ok()) {
      return InvalidConfig(std::string(s.message()));
    }
  }
  return absl::OkStatus();
}

int SelectionSize(int joined, int min_clients, double fraction) {
  // The tolerance keeps 0.7 * 10 = 7.000000000000001 from rounding up to 8.
  const int by_fraction = static_cast<int>(
      std::ceil(fraction * static_cast<double>(joined) - 1e-9));
  return std::min(joined, std::max(min_clients, by_fraction));
}

json RoundRecordToJson(const RoundRecord& r) {
  return {{"session_id", r.session_id},   {"round", r.round},
          {"n_selected", r.n_selected},   {"n_completed", r.n_completed},
          {"global_loss", r.global_loss}, {"global_metric", r.global_metric},
          {"started_at", r.started_at},   {"ended_at", r.ended_at}};
}

absl::StatusOr<RoundRecord> RoundRecordFromJson(const json& doc) {
  RoundRecord r;
  try {
    r.session_id = doc.at("session_id").get<std::string>();
    r.round = doc.at("round").get<int64_t>();
    r.n_selected = doc.at("n_selected").get<int>();
    r.n_completed = doc.at("n_completed").get<int>();
    r.global_loss = doc.at("global_loss").get<double>();
    r.global_metric = doc.at("global_metric").get<double>();
    r.started_at = doc.at("started_at").get<int64_t>();
    r.ended_at = doc.at("ended_at").get<int64_t>();
  } catch (const json::exception& e) {
    return MakeError(absl::StatusCode::kInvalidArgument, "InvalidRecord",
                     e.what());
  }
  return r;
}

}  // namespace campusfl
