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

#include "campusfl/analytics/fa_query.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "campusfl/base/status.h"

namespace campusfl {
namespace {

using nlohmann::json;

absl::Status InvalidQuery(const std::string& detail) {
  return MakeError(absl::StatusCode::kInvalidArgument, "InvalidQuery", detail);
}

json ClusterJson(const std::optional<std::string>& cluster) {
  return cluster.has_value() ? json(*cluster) : json(nullptr);
}

absl::Status CheckKeys(const json& doc,
                       std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) return InvalidQuery(absl::StrCat("unknown field '", key, "'"));
  }
  for (const char* a : allowed) {
    if (!doc.contains(a)) return InvalidQuery(absl::StrCat("missing '", a, "'"));
  }
  return absl::OkStatus();
}

}  // namespace

BucketSpec BucketSpec::DefaultSteps() {
  BucketSpec spec;
  for (int edge = 0; edge <= 24000; edge += 2000) spec.edges.push_back(edge);
  spec.clamp = true;
  return spec;
}

absl::Status ValidateBucketSpec(const BucketSpec& spec) {
  if (spec.edges.size() < 3) return InvalidQuery("need at least two buckets");
  for (size_t i = 0; i < spec.edges.size(); ++i) {
    if (!std::isfinite(spec.edges[i])) return InvalidQuery("edges must be finite");
    if (i > 0 && !(spec.edges[i] > spec.edges[i - 1])) {
      return InvalidQuery("edges must be strictly increasing");
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateQuery(const FaQuery& query) {
  if (query.query_id.empty()) return InvalidQuery("empty query_id");
  if (const auto* hh = std::get_if<HeavyHittersQuery>(&query.kind)) {
    CAMPUSFL_RETURN_IF_ERROR(ValidateBucketSpec(hh->buckets));
    if (hh->k < 1 || hh->k > hh->buckets.num_buckets()) {
      return InvalidQuery(absl::StrCat("k=", hh->k, " outside [1, ",
                                       hh->buckets.num_buckets(), "]"));
    }
    if (!(hh->epsilon > 0)) return InvalidQuery("epsilon must be positive");
    return absl::OkStatus();
  }
  const auto& mean = std::get<DpMeanQuery>(query.kind);
  if (!(mean.clip_lo < mean.clip_hi)) {
    return InvalidQuery("clip_lo must be below clip_hi");
  }
  if (!(mean.epsilon > 0)) return InvalidQuery("epsilon must be positive");
  return absl::OkStatus();
}

json QueryToJson(const FaQuery& query) {
  if (const auto* hh = std::get_if<HeavyHittersQuery>(&query.kind)) {
    return json{{"query_id", query.query_id},
                {"kind", "heavy_hitters"},
                {"buckets",
                 json{{"edges", hh->buckets.edges}, {"clamp", hh->buckets.clamp}}},
                {"k", hh->k},
                {"epsilon", hh->epsilon},
                {"cluster_by", hh->cluster_by},
                {"attribute", hh->attribute}};
  }
  const auto& mean = std::get<DpMeanQuery>(query.kind);
  return json{{"query_id", query.query_id}, {"kind", "dp_mean"},
              {"attribute", mean.attribute}, {"clip_lo", mean.clip_lo},
              {"clip_hi", mean.clip_hi},     {"epsilon", mean.epsilon}};
}

absl::StatusOr<FaQuery> QueryFromJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string() ||
      !doc.contains("query_id") || !doc["query_id"].is_string()) {
    return InvalidQuery("query needs string query_id and kind");
  }
  FaQuery query;
  query.query_id = doc["query_id"].get<std::string>();
  const std::string kind = doc["kind"].get<std::string>();
  try {
    if (kind == "heavy_hitters") {
      json copy = doc;
      if (!copy.contains("attribute")) copy["attribute"] = "steps";
      CAMPUSFL_RETURN_IF_ERROR(CheckKeys(
          copy, {"query_id", "kind", "buckets", "k", "epsilon", "cluster_by",
                 "attribute"}));
      const json& b = copy["buckets"];
      if (!b.is_object()) return InvalidQuery("buckets must be an object");
      CAMPUSFL_RETURN_IF_ERROR(CheckKeys(b, {"edges", "clamp"}));
      HeavyHittersQuery hh;
      if (!b["edges"].is_array() || !b["clamp"].is_boolean()) {
        return InvalidQuery("buckets needs edges array and clamp bool");
      }
      for (const json& e : b["edges"]) {
        if (!e.is_number()) return InvalidQuery("edges must be numbers");
        hh.buckets.edges.push_back(e.get<double>());
      }
      hh.buckets.clamp = b["clamp"].get<bool>();
      if (!copy["k"].is_number_integer()) return InvalidQuery("k must be an integer");
      if (!copy["epsilon"].is_number()) return InvalidQuery("epsilon must be a number");
      if (!copy["cluster_by"].is_string() || !copy["attribute"].is_string()) {
        return InvalidQuery("cluster_by and attribute must be strings");
      }
      hh.k = copy["k"].get<int>();
      hh.epsilon = copy["epsilon"].get<double>();
      hh.cluster_by = copy["cluster_by"].get<std::string>();
      hh.attribute = copy["attribute"].get<std::string>();
      query.kind = std::move(hh);
    } else if (kind == "dp_mean") {
      CAMPUSFL_RETURN_IF_ERROR(CheckKeys(
          doc, {"query_id", "kind", "attribute", "clip_lo", "clip_hi", "epsilon"}));
      if (!doc["attribute"].is_string() || !doc["clip_lo"].is_number() ||
          !doc["clip_hi"].is_number() || !doc["epsilon"].is_number()) {
        return InvalidQuery("dp_mean field types");
      }
      query.kind = DpMeanQuery{doc["attribute"].get<std::string>(),
                               doc["clip_lo"].get<double>(),
                               doc["clip_hi"].get<double>(),
                               doc["epsilon"].get<double>()};
    } else {
      return InvalidQuery(absl::StrCat("unknown query kind '", kind, "'"));
    }
  } catch (const json::exception& e) {
    return InvalidQuery(e.what());
  }
  CAMPUSFL_RETURN_IF_ERROR(ValidateQuery(query));
  return query;
}

json FaResultToJson(const FaResult& result) {
  if (const auto* hh = std::get_if<HeavyHitterResult>(&result)) {
    json clusters = json::array();
    for (const ClusterTopK& c : hh->per_cluster) {
      json top = json::array();
      for (const BucketEstimate& b : c.top) {
        top.push_back(json{{"bucket", b.bucket}, {"estimate", b.estimate}});
      }
      clusters.push_back(json{{"cluster", ClusterJson(c.cluster)},
                              {"top", std::move(top)}});
    }
    return json{{"query_id", hh->query_id},
                {"kind", "heavy_hitters"},
                {"per_cluster", std::move(clusters)},
                {"n_reports", hh->n_reports}};
  }
  const auto& mean = std::get<DpMeanResult>(result);
  return json{{"query_id", mean.query_id},
              {"kind", "dp_mean"},
              {"estimate", mean.estimate},
              {"n_reports", mean.n_reports}};
}

}  // namespace campusfl
