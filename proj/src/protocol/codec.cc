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

#include "campusfl/protocol/codec.h"

#include <cmath>
#include <limits>
#include <type_traits>

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {
namespace {

using nlohmann::json;

absl::Status Schema(std::string_view detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "SchemaViolation",
                   detail);
}

// --- Encoding --------------------------------------------------------------

json Nullable(const std::optional<std::string>& s) {
  return s.has_value() ? json(*s) : json(nullptr);
}

struct PayloadEncoder {
  json operator()(const JoinRequest& m) const {
    return {{"client_id", m.client_id},
            {"platform", PlatformName(m.platform)},
            {"app_version", m.app_version}};
  }
  json operator()(const JoinAccept& m) const {
    return {{"round", m.round},
            {"model_spec",
             m.model_spec ? SpecToJson(*m.model_spec) : json(nullptr)}};
  }
  json operator()(const TaskRequest& m) const {
    return {{"platform", PlatformName(m.platform)},
            {"app_version", m.app_version}};
  }
  json operator()(const TaskManifest& m) const {
    json tasks = json::array();
    for (const TaskEntry& t : m.tasks) {
      tasks.push_back(
          {{"task_id", t.task_id},
           {"model_id", Nullable(t.model_id)},
           {"model_version", t.model_version},
           {"kind", t.kind},
           {"port", t.port},
           {"hyperparams",
            t.hyperparams ? HyperparamsToJson(*t.hyperparams) : json(nullptr)},
           {"dp", t.dp ? DpConfigToJson(*t.dp) : json(nullptr)}});
    }
    return {{"tasks", std::move(tasks)}};
  }
  json operator()(const FitIns& m) const {
    return {{"round", m.round},
            {"params", m.params},
            {"hyperparams", HyperparamsToJson(m.hyperparams)}};
  }
  json operator()(const FitRes& m) const {
    return {{"round", m.round},
            {"params", m.params},
            {"num_examples", m.num_examples}};
  }
  json operator()(const EvaluateIns& m) const {
    return {{"round", m.round}, {"params", m.params}};
  }
  json operator()(const EvaluateRes& m) const {
    return {{"round", m.round},
            {"loss", m.loss},
            {"metric", m.metric},
            {"num_examples", m.num_examples}};
  }
  json operator()(const FaQueryIns& m) const {
    return {{"query", QueryToJson(m.query)}};
  }
  json operator()(const FaReportRes& m) const {
    json payload = std::holds_alternative<int64_t>(m.payload)
                       ? json(std::get<int64_t>(m.payload))
                       : json(std::get<double>(m.payload));
    return {{"pseudonym", m.pseudonym},
            {"payload", std::move(payload)},
            {"cluster", Nullable(m.cluster)}};
  }
  json operator()(const RoundEnd& m) const {
    return {{"round", m.round},
            {"global_params", m.global_params},
            {"done", m.done}};
  }
  json operator()(const ErrorMsg& m) const {
    return {{"code", m.code}, {"detail", m.detail}};
  }
};

bool AllFinite(const json& doc) {
  switch (doc.type()) {
    case json::value_t::number_float:
      return std::isfinite(doc.get<double>());
    case json::value_t::array:
    case json::value_t::object:
      for (const json& child : doc) {
        if (!AllFinite(child)) return false;
      }
      return true;
    default:
      return true;
  }
}

// --- Decoding --------------------------------------------------------------

absl::Status ExactKeys(const json& doc, const std::string& where,
                       std::initializer_list<const char*> keys) {
  if (!doc.is_object()) return Schema(absl::StrCat(where, " is not an object"));
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) return Schema(absl::StrCat(where, ": unknown field '", key, "'"));
  }
  for (const char* k : keys) {
    if (!doc.contains(k)) {
      return Schema(absl::StrCat(where, ": missing field '", k, "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<int64_t> Int(const json& doc, const std::string& field) {
  const json& v = doc.at(field);
  if (v.is_number_integer() && !v.is_number_unsigned()) return v.get<int64_t>();
  if (v.is_number_unsigned() &&
      v.get<uint64_t>() <=
          static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
    return static_cast<int64_t>(v.get<uint64_t>());
  }
  return Schema(absl::StrCat("'", field, "' must be an integer"));
}

absl::StatusOr<double> Real(const json& doc, const std::string& field) {
  const json& v = doc.at(field);
  if (!v.is_number()) return Schema(absl::StrCat("'", field, "' must be a number"));
  return v.get<double>();
}

absl::StatusOr<std::string> String(const json& doc, const std::string& field) {
  const json& v = doc.at(field);
  if (!v.is_string()) return Schema(absl::StrCat("'", field, "' must be a string"));
  return v.get<std::string>();
}

absl::StatusOr<std::optional<std::string>> NullableString(
    const json& doc, const std::string& field) {
  if (doc.at(field).is_null()) return std::optional<std::string>();
  CAMPUSFL_ASSIGN_OR_RETURN(std::string s, String(doc, field));
  return std::optional<std::string>(std::move(s));
}

absl::StatusOr<bool> Bool(const json& doc, const std::string& field) {
  const json& v = doc.at(field);
  if (!v.is_boolean()) return Schema(absl::StrCat("'", field, "' must be a bool"));
  return v.get<bool>();
}

absl::StatusOr<std::vector<double>> Reals(const json& doc,
                                          const std::string& field) {
  const json& v = doc.at(field);
  if (!v.is_array()) return Schema(absl::StrCat("'", field, "' must be an array"));
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number()) {
      return Schema(absl::StrCat("'", field, "' must hold numbers"));
    }
    out.push_back(x.get<double>());
  }
  return out;
}

absl::StatusOr<Platform> PlatformField(const json& doc) {
  CAMPUSFL_ASSIGN_OR_RETURN(std::string name, String(doc, "platform"));
  auto platform = ParsePlatform(name);
  if (!platform.ok()) return Schema(std::string(platform.status().message()));
  return *platform;
}

// Nested documents report their own error kinds; on the wire they are all
// schema violations.
template <typename T>
absl::StatusOr<T> Nested(absl::StatusOr<T> parsed) {
  if (!parsed.ok()) return Schema(std::string(parsed.status().message()));
  return parsed;
}

absl::StatusOr<Payload> DecodePayload(const std::string& type, const json& p) {
  if (type == "JoinRequest") {
    CAMPUSFL_RETURN_IF_ERROR(
        ExactKeys(p, type, {"client_id", "platform", "app_version"}));
    JoinRequest m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.client_id, String(p, "client_id"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.platform, PlatformField(p));
    CAMPUSFL_ASSIGN_OR_RETURN(m.app_version, String(p, "app_version"));
    return m;
  }
  if (type == "JoinAccept") {
    CAMPUSFL_RETURN_IF_ERROR(ExactKeys(p, type, {"round", "model_spec"}));
    JoinAccept m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.round, Int(p, "round"));
    if (!p.at("model_spec").is_null()) {
      CAMPUSFL_ASSIGN_OR_RETURN(m.model_spec,
                                Nested(SpecFromJson(p.at("model_spec"))));
    }
    return m;
  }
  if (type == "TaskRequest") {
    CAMPUSFL_RETURN_IF_ERROR(ExactKeys(p, type, {"platform", "app_version"}));
    TaskRequest m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.platform, PlatformField(p));
    CAMPUSFL_ASSIGN_OR_RETURN(m.app_version, String(p, "app_version"));
    return m;
  }
  if (type == "TaskManifest") {
    CAMPUSFL_RETURN_IF_ERROR(ExactKeys(p, type, {"tasks"}));
    if (!p.at("tasks").is_array()) return Schema("'tasks' must be an array");
    TaskManifest m;
    for (const json& t : p.at("tasks")) {
      CAMPUSFL_RETURN_IF_ERROR(ExactKeys(
          t, "task", {"task_id", "model_id", "model_version", "kind", "port",
                      "hyperparams", "dp"}));
      TaskEntry e;
      CAMPUSFL_ASSIGN_OR_RETURN(e.task_id, String(t, "task_id"));
      CAMPUSFL_ASSIGN_OR_RETURN(e.model_id, NullableString(t, "model_id"));
      CAMPUSFL_ASSIGN_OR_RETURN(e.model_version, Int(t, "model_version"));
      CAMPUSFL_ASSIGN_OR_RETURN(e.kind, String(t, "kind"));
      CAMPUSFL_ASSIGN_OR_RETURN(int64_t port, Int(t, "port"));
      if (port < 0 || port > 65535) return Schema("'port' out of range");
      e.port = static_cast<int>(port);
      if (!t.at("hyperparams").is_null()) {
        CAMPUSFL_ASSIGN_OR_RETURN(e.hyperparams,
                                  Nested(HyperparamsFromJson(t.at("hyperparams"))));
      }
      if (!t.at("dp").is_null()) {
        CAMPUSFL_ASSIGN_OR_RETURN(e.dp, Nested(DpConfigFromJson(t.at("dp"))));
      }
      m.tasks.push_back(std::move(e));
    }
    return m;
  }
  if (type == "FitIns") {
    CAMPUSFL_RETURN_IF_ERROR(
        ExactKeys(p, type, {"round", "params", "hyperparams"}));
    FitIns m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.round, Int(p, "round"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.params, Reals(p, "params"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.hyperparams,
                              Nested(HyperparamsFromJson(p.at("hyperparams"))));
    return m;
  }
  if (type == "FitRes") {
    CAMPUSFL_RETURN_IF_ERROR(
        ExactKeys(p, type, {"round", "params", "num_examples"}));
    FitRes m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.round, Int(p, "round"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.params, Reals(p, "params"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.num_examples, Int(p, "num_examples"));
    return m;
  }
  if (type == "EvaluateIns") {
    CAMPUSFL_RETURN_IF_ERROR(ExactKeys(p, type, {"round", "params"}));
    EvaluateIns m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.round, Int(p, "round"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.params, Reals(p, "params"));
    return m;
  }
  if (type == "EvaluateRes") {
    CAMPUSFL_RETURN_IF_ERROR(
        ExactKeys(p, type, {"round", "loss", "metric", "num_examples"}));
    EvaluateRes m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.round, Int(p, "round"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.loss, Real(p, "loss"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.metric, Real(p, "metric"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.num_examples, Int(p, "num_examples"));
    return m;
  }
  if (type == "FAQueryIns") {
    CAMPUSFL_RETURN_IF_ERROR(ExactKeys(p, type, {"query"}));
    FaQueryIns m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.query, Nested(QueryFromJson(p.at("query"))));
    return m;
  }
  if (type == "FAReportRes") {
    CAMPUSFL_RETURN_IF_ERROR(
        ExactKeys(p, type, {"pseudonym", "payload", "cluster"}));
    FaReportRes m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.pseudonym, String(p, "pseudonym"));
    const json& payload = p.at("payload");
    if (payload.is_number_float()) {
      m.payload = payload.get<double>();
    } else {
      CAMPUSFL_ASSIGN_OR_RETURN(m.payload, Int(p, "payload"));
    }
    CAMPUSFL_ASSIGN_OR_RETURN(m.cluster, NullableString(p, "cluster"));
    return m;
  }
  if (type == "RoundEnd") {
    CAMPUSFL_RETURN_IF_ERROR(
        ExactKeys(p, type, {"round", "global_params", "done"}));
    RoundEnd m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.round, Int(p, "round"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.global_params, Reals(p, "global_params"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.done, Bool(p, "done"));
    return m;
  }
  if (type == "ErrorMsg") {
    CAMPUSFL_RETURN_IF_ERROR(ExactKeys(p, type, {"code", "detail"}));
    ErrorMsg m;
    CAMPUSFL_ASSIGN_OR_RETURN(m.code, String(p, "code"));
    CAMPUSFL_ASSIGN_OR_RETURN(m.detail, String(p, "detail"));
    return m;
  }
  return MakeError(absl::StatusCode::kInvalidArgument, "UnknownType",
                   absl::StrCat("'", type, "'"));
}

uint32_t ReadLength(std::string_view bytes) {
  return (static_cast<uint32_t>(static_cast<uint8_t>(bytes[0])) << 24) |
         (static_cast<uint32_t>(static_cast<uint8_t>(bytes[1])) << 16) |
         (static_cast<uint32_t>(static_cast<uint8_t>(bytes[2])) << 8) |
         static_cast<uint32_t>(static_cast<uint8_t>(bytes[3]));
}

absl::Status TooLarge(size_t size) {
  return MakeError(absl::StatusCode::kResourceExhausted, "TooLarge",
                   absl::StrCat(size, " bytes exceeds ", kMaxFrame));
}

}  // namespace

std::string_view TypeName(const Payload& payload) {
  static constexpr std::string_view kNames[] = {
      "JoinRequest", "JoinAccept",  "TaskRequest", "TaskManifest",
      "FitIns",      "FitRes",      "EvaluateIns", "EvaluateRes",
      "FAQueryIns",  "FAReportRes", "RoundEnd",    "ErrorMsg"};
  static_assert(std::size(kNames) == std::variant_size_v<Payload>);
  return kNames[payload.index()];
}

json PayloadToJson(const Payload& payload) {
  return std::visit(PayloadEncoder{}, payload);
}

absl::StatusOr<Payload> PayloadFromJson(const std::string& type,
                                        const json& payload) {
  if (!payload.is_object()) return Schema("payload is not an object");
  return DecodePayload(type, payload);
}

absl::StatusOr<std::string> FrameBody(std::string_view body) {
  if (body.size() > kMaxFrame) return TooLarge(body.size());
  const auto n = static_cast<uint32_t>(body.size());
  std::string frame;
  frame.reserve(kFrameHeaderBytes + body.size());
  frame.push_back(static_cast<char>(n >> 24));
  frame.push_back(static_cast<char>(n >> 16));
  frame.push_back(static_cast<char>(n >> 8));
  frame.push_back(static_cast<char>(n));
  frame.append(body);
  return frame;
}

absl::StatusOr<std::string> EncodeBody(const Message& msg) {
  // Every array element costs at least two bytes ("0,"), so oversized
  // parameter vectors are rejected before building the document.
  const size_t elements = std::visit(
      [](const auto& m) -> size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RoundEnd>) {
          return m.global_params.size();
        } else if constexpr (requires { m.params; }) {
          return m.params.size();
        } else {
          return 0;
        }
      },
      msg.payload);
  if (elements > kMaxFrame / 2) return TooLarge(elements * 2);
  json doc = {{"v", msg.v},
              {"session", msg.session},
              {"type", TypeName(msg.payload)},
              {"payload", std::visit(PayloadEncoder{}, msg.payload)}};
  if (!AllFinite(doc)) return Schema("non-finite number");
  try {
    return doc.dump();
  } catch (const json::exception& e) {
    return Schema(e.what());
  }
}

absl::StatusOr<std::string> EncodeMessage(const Message& msg) {
  CAMPUSFL_ASSIGN_OR_RETURN(std::string body, EncodeBody(msg));
  return FrameBody(body);
}

absl::StatusOr<Message> DecodeBody(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    return MakeError(absl::StatusCode::kInvalidArgument, "BadJson", e.what());
  }
  if (!doc.is_object()) return Schema("message is not an object");
  // The version is checked first so that a future schema is reported as such
  // rather than as a field mismatch.
  if (doc.contains("v")) {
    const json& v = doc.at("v");
    if (!v.is_number_integer()) return Schema("'v' must be an integer");
    const bool current = v.is_number_unsigned()
                             ? v.get<uint64_t>() == kProtocolVersion
                             : v.get<int64_t>() == kProtocolVersion;
    if (!current) {
      return MakeError(absl::StatusCode::kInvalidArgument, "UnsupportedVersion",
                       absl::StrCat("v=", v.dump()));
    }
  }
  CAMPUSFL_RETURN_IF_ERROR(
      ExactKeys(doc, "message", {"v", "session", "type", "payload"}));
  Message msg;
  CAMPUSFL_ASSIGN_OR_RETURN(msg.session, String(doc, "session"));
  CAMPUSFL_ASSIGN_OR_RETURN(std::string type, String(doc, "type"));
  CAMPUSFL_ASSIGN_OR_RETURN(msg.payload, DecodePayload(type, doc.at("payload")));
  return msg;
}

absl::StatusOr<Message> DecodeMessage(std::string_view bytes) {
  if (bytes.size() < kFrameHeaderBytes) {
    return MakeError(absl::StatusCode::kInvalidArgument, "Truncated",
                     "short header");
  }
  const size_t length = ReadLength(bytes);
  if (length > kMaxFrame) return TooLarge(length);
  const size_t available = bytes.size() - kFrameHeaderBytes;
  if (available < length) {
    return MakeError(absl::StatusCode::kInvalidArgument, "Truncated",
                     absl::StrCat("prefix says ", length, ", have ", available));
  }
  if (available > length) {
    return MakeError(absl::StatusCode::kInvalidArgument, "TrailingBytes",
                     absl::StrCat(available - length, " extra bytes"));
  }
  return DecodeBody(bytes.substr(kFrameHeaderBytes));
}

absl::StatusOr<std::optional<Message>> FrameReader::Next() {
  if (buffer_.size() < kFrameHeaderBytes) return std::optional<Message>();
  const size_t length = ReadLength(buffer_);
  if (length > kMaxFrame) return TooLarge(length);
  if (buffer_.size() < kFrameHeaderBytes + length) {
    return std::optional<Message>();
  }
  auto msg = DecodeBody(
      std::string_view(buffer_).substr(kFrameHeaderBytes, length));
  buffer_.erase(0, kFrameHeaderBytes + length);
  if (!msg.ok()) return msg.status();
  return std::optional<Message>(*std::move(msg));
}

}  // namespace campusfl
