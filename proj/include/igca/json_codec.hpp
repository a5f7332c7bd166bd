/* Copyright 2026 The IGCA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <string>

#include "json.hpp"

#include "igca/broker.hpp"
#include "igca/decision.hpp"
#include "igca/registry.hpp"

// JSON shapes used by the line protocol, the HTTP API and the CLI. Field
// names follow the registry XML attributes.
namespace igca::codec {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorCode::kSchemaError, what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
  if (fallback && (!j.is_object() || !j.contains(key))) return *fallback;
  const auto& v = field(j, key);
  if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline std::string text(const json& j, const char* key, std::optional<std::string> fallback = std::nullopt) {
  if (fallback && (!j.is_object() || !j.contains(key))) return *fallback;
  const auto& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

template <typename T>
T enum_field(const json& j, const char* key, std::optional<T> (*parser)(std::string_view),
             std::optional<T> fallback = std::nullopt) {
  if (fallback && (!j.is_object() || !j.contains(key))) return *fallback;
  const std::string s = text(j, key);
  auto v = parser(s);
  if (!v) bad(std::string("field '") + key + "' has unknown value '" + s + "'");
  return *v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Domain -> JSON

inline json to_json(const JobProfile& j) {
  return {{"jobId", j.job_id},
          {"name", j.name},
          {"dept", j.dept},
          {"class", to_string(j.service_class)},
          {"frequency", to_string(j.frequency)},
          {"fileSizeGb", j.file_size_gb},
          {"downloadsPerHour", j.downloads_per_hour},
          {"users", j.users},
          {"frameRateMbps", j.frame_rate_mbps},
          {"encodingsPerWeek", j.encodings_per_week},
          {"hoursPerEncoding", j.hours_per_encoding},
          {"hoursPerWeek", j.hours_per_week},
          {"bandwidthMbps", j.bandwidth_req_mbps}};
}

inline json to_json(const PolicyEnvelope& p) {
  return {{"securityLevel", p.security_level},
          {"qos", to_string(p.qos_tier)},
          {"budget", p.budget},
          {"availability", p.availability_req},
          {"allowLocal", p.allow_local},
          {"allowPrivate", p.allow_private}};
}

inline json to_json(const Placement& d) {
  json out = {{"type", to_string(d.type)}};
  if (d.type == Destination::kPrivate) out["server"] = d.server;
  return out;
}

inline json to_json(const RegistryEntry& e) {
  return {{"job", to_json(e.job)},
          {"policy", to_json(e.policy)},
          {"destination", to_json(e.destination)},
          {"confirmedBy", e.confirmed_by},
          {"confirmedAt", e.confirmed_at}};
}

inline json to_json(const EnergyEstimate& e) {
  json terms = json::array();
  for (const auto& t : e.terms) terms.push_back({{"name", t.name}, {"value", t.value}});
  return {{"destination", to_string(e.destination)},
          {"value", e.value},
          {"combination", e.combination == Combination::kSum ? "sum" : "product"},
          {"terms", terms}};
}

inline json to_json(const Advisory& a) {
  return {{"class", to_string(a.service_class)},
          {"component", to_string(a.energy_component)},
          {"deployment", to_string(a.deployment)},
          {"significance", to_string(a.significance)},
          {"condition", a.condition},
          {"triggered", a.triggered}};
}

inline json to_json(DestinationSet set) {
  json out = json::array();
  for (auto d : kAllDestinations) {
    if (set.contains(d)) out.push_back(to_string(d));
  }
  return out;
}

inline json to_json(const GreenOffer& o) {
  json windows = json::array();
  for (const auto& w : o.green_windows) windows.push_back({{"start", w.start_hour}, {"end", w.end_hour}});
  return {{"offerId", o.offer_id},     {"csp", o.csp_id},
          {"class", to_string(o.service_class)}, {"price", o.price},
          {"qos", to_string(o.qos_tier)}, {"availability", o.availability},
          {"windows", windows}};
}

inline json to_json(const CspRecord& r) {
  return {{"csp", r.csp_id},
          {"class", to_string(r.service_class)},
          {"carbonIntensity", r.carbon_intensity},
          {"energyPerUnit", r.energy_per_unit},
          {"region", r.region}};
}

inline json to_json(const BrokerSelection& s) {
  return {{"offer", to_json(s.offer)}, {"carbonRate", s.carbon_rate}};
}

inline json to_json(const EstimateSet& estimates) {
  json out = json::array();
  for (const auto& e : estimates) out.push_back(to_json(e));
  return out;
}

inline json to_json(const PlacementDecision& d) {
  json advisories = json::array();
  for (const auto& a : d.advisories) advisories.push_back(to_json(a));
  json out = {{"jobId", d.job_id},
              {"recommendation", to_string(d.chosen)},
              {"estimates", to_json(d.estimates)},
              {"compliant", to_json(d.compliant)},
              {"rationale", d.rationale},
              {"advisories", advisories}};
  out["offer"] = d.offer ? to_json(*d.offer) : json(nullptr);
  return out;
}

inline json to_json(const InfrastructureSpec& infra, const SignificanceThresholds& t) {
  json machines = json::array(), servers = json::array();
  for (const auto& m : infra.machines) {
    machines.push_back(
        {{"id", m.id}, {"powerW", m.active_power_w}, {"diskGb", m.disk_capacity_gb}, {"diskPowerW", m.disk_power_w}});
  }
  for (const auto& s : infra.servers) {
    servers.push_back({{"id", s.id},
                       {"function", to_string(s.function)},
                       {"frequency", to_string(s.usage_frequency)},
                       {"mode", to_string(s.mode)},
                       {"capacityMbps", s.capacity_mbps},
                       {"powerW", s.power_w},
                       {"diskGb", s.disk_capacity_gb},
                       {"diskPowerW", s.disk_power_w},
                       {"users", s.concurrent_users}});
  }
  auto path = [](const std::vector<NetworkElement>& elements) {
    json out = json::array();
    for (const auto& e : elements)
      out.push_back({{"name", e.name}, {"powerW", e.power_w}, {"capacityMbps", e.capacity_mbps}});
    return out;
  };
  return {{"machines", machines},
          {"servers", servers},
          {"paths", {{"private", path(infra.private_path)}, {"public", path(infra.public_path)}}},
          {"coefficients",
           {{"contentServerJPerMb", infra.content_server_j_per_mb},
            {"transportOverrideJPerMb", infra.transport_override_j_per_mb}}},
          {"thresholds",
           {{"highFrameRateMbps", t.high_frame_rate_mbps},
            {"fewUsersPerServer", t.few_users_per_server},
            {"lowDownloadsPerHour", t.low_downloads_per_hour},
            {"highDownloadsPerHour", t.high_downloads_per_hour},
            {"mediumEncodingsPerWeek", t.medium_encodings_per_week}}}};
}

// ---------------------------------------------------------------------------
// JSON -> domain (schema failures raise SchemaError)

inline JobProfile job_from_json(const json& j) {
  using namespace detail;
  JobProfile job;
  job.job_id = text(j, "jobId");
  job.name = text(j, "name", std::string{});
  job.dept = text(j, "dept", std::string{});
  job.service_class = enum_field(j, "class", &parse_service_class);
  job.frequency = enum_field(j, "frequency", &parse_frequency, std::optional(Frequency::kIntermittent));
  job.file_size_gb = number(j, "fileSizeGb", 0.0);
  job.downloads_per_hour = number(j, "downloadsPerHour", 0.0);
  job.users = number(j, "users", 0.0);
  job.frame_rate_mbps = number(j, "frameRateMbps", 0.0);
  job.encodings_per_week = number(j, "encodingsPerWeek", 0.0);
  job.hours_per_encoding = number(j, "hoursPerEncoding", 0.0);
  job.hours_per_week = number(j, "hoursPerWeek", 0.0);
  job.bandwidth_req_mbps = number(j, "bandwidthMbps", 0.0);
  return job;
}

inline PolicyEnvelope policy_from_json(const json& j) {
  using namespace detail;
  PolicyEnvelope p;
  const double level = number(j, "securityLevel", 1.0);
  if (level != 1.0 && level != 2.0 && level != 3.0) bad("securityLevel must be 1, 2 or 3");
  p.security_level = static_cast<int>(level);
  p.qos_tier = enum_field(j, "qos", &parse_qos_tier, std::optional(QosTier::kBronze));
  p.budget = number(j, "budget", 0.0);
  p.availability_req = number(j, "availability", 0.0);
  if (j.contains("allowLocal")) p.allow_local = field(j, "allowLocal").get<bool>();
  if (j.contains("allowPrivate")) p.allow_private = field(j, "allowPrivate").get<bool>();
  return p;
}

inline Placement placement_from_json(const json& j) {
  Placement d;
  d.type = detail::enum_field(j, "type", &parse_destination);
  if (d.type == Destination::kPrivate) {
    d.server = detail::text(j, "server");
  } else if (j.contains("server") && !j.at("server").is_null()) {
    detail::bad("server is only allowed for private destinations");
  }
  return d;
}

inline std::pair<InfrastructureSpec, SignificanceThresholds> infrastructure_from_json(const json& j) {
  using namespace detail;
  InfrastructureSpec infra;
  SignificanceThresholds t;
  if (j.contains("machines")) {
    for (const auto& m : field(j, "machines"))
      infra.machines.push_back({text(m, "id"), number(m, "powerW"), number(m, "diskGb"), number(m, "diskPowerW")});
  }
  if (j.contains("servers")) {
    for (const auto& s : field(j, "servers")) {
      ServerSpec spec;
      spec.id = text(s, "id");
      spec.function = enum_field(s, "function", &parse_server_function);
      spec.usage_frequency = enum_field(s, "frequency", &parse_frequency);
      spec.mode = enum_field(s, "mode", &parse_server_mode);
      spec.capacity_mbps = number(s, "capacityMbps");
      spec.power_w = number(s, "powerW");
      spec.disk_capacity_gb = number(s, "diskGb");
      spec.disk_power_w = number(s, "diskPowerW");
      const double users = number(s, "users");
      if (!(users >= 1.0) || users != static_cast<double>(static_cast<unsigned>(users))) bad("users must be >= 1");
      spec.concurrent_users = static_cast<unsigned>(users);
      infra.servers.push_back(std::move(spec));
    }
  }
  auto read_path = [](const json& arr) {
    std::vector<NetworkElement> out;
    for (const auto& e : arr) out.push_back({text(e, "name"), number(e, "powerW"), number(e, "capacityMbps")});
    return out;
  };
  if (j.contains("paths")) {
    const auto& paths = field(j, "paths");
    if (paths.contains("private")) infra.private_path = read_path(paths.at("private"));
    if (paths.contains("public")) infra.public_path = read_path(paths.at("public"));
  }
  if (j.contains("coefficients")) {
    const auto& c = field(j, "coefficients");
    infra.content_server_j_per_mb = number(c, "contentServerJPerMb", 0.0);
    infra.transport_override_j_per_mb = number(c, "transportOverrideJPerMb", 0.0);
  }
  if (j.contains("thresholds")) {
    const auto& th = field(j, "thresholds");
    t.high_frame_rate_mbps = number(th, "highFrameRateMbps", t.high_frame_rate_mbps);
    t.few_users_per_server = number(th, "fewUsersPerServer", t.few_users_per_server);
    t.low_downloads_per_hour = number(th, "lowDownloadsPerHour", t.low_downloads_per_hour);
    t.high_downloads_per_hour = number(th, "highDownloadsPerHour", t.high_downloads_per_hour);
    t.medium_encodings_per_week = number(th, "mediumEncodingsPerWeek", t.medium_encodings_per_week);
  }
  return {std::move(infra), t};
}

}  // namespace igca::codec
