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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "igca/clock.hpp"
#include "igca/energy_model.hpp"
#include "igca/file_io.hpp"
#include "igca/policy.hpp"
#include "igca/xml.hpp"

namespace igca {

/// Where a registered job runs. `server` is set iff the type is private.
struct Placement {
  Destination type = Destination::kLocal;
  std::string server;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct RegistryEntry {
  JobProfile job;
  PolicyEnvelope policy;
  Placement destination;
  std::string confirmed_by;
  std::string confirmed_at;  // ISO-8601 UTC

  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// A reference value reported alongside the fixture, never computed from.
struct ReportedValue {
  std::string job_id;
  Destination destination = Destination::kLocal;
  double nominal_w = 0.0;

  friend bool operator==(const ReportedValue&, const ReportedValue&) = default;
};

struct RegistryFile {
  std::uint64_t revision = 0;
  std::vector<RegistryEntry> entries;
  InfrastructureSpec infrastructure;
  SignificanceThresholds thresholds;
  std::vector<ReportedValue> reported;

  friend bool operator==(const RegistryFile&, const RegistryFile&) = default;
};

// ---------------------------------------------------------------------------
// Validation

inline void validate_infrastructure(const InfrastructureSpec& infra) {
  std::set<std::string> ids;
  for (const auto& m : infra.machines) {
    validate(m);
    if (!ids.insert("m:" + m.id).second) throw Error(ErrorCode::kSchemaError, "duplicate machine id '" + m.id + "'");
  }
  for (const auto& s : infra.servers) {
    validate(s);
    if (!ids.insert("s:" + s.id).second) throw Error(ErrorCode::kSchemaError, "duplicate server id '" + s.id + "'");
  }
  for (const auto& e : infra.private_path) validate(e);
  for (const auto& e : infra.public_path) validate(e);
  if (!(infra.content_server_j_per_mb >= 0.0) || !(infra.transport_override_j_per_mb >= 0.0))
    throw Error(ErrorCode::kInvalidElement, "coefficients must be >= 0");
}

/// Checks one entry against the infrastructure it will be stored with.
inline void validate_entry(const RegistryEntry& entry, const InfrastructureSpec& infra) {
  if (entry.job.job_id.empty()) throw Error(ErrorCode::kInvalidJob, "job id must not be empty");
  validate(entry.job);
  validate(entry.policy);
  if (!parse_iso8601(entry.confirmed_at))
    throw Error(ErrorCode::kSchemaError, "confirmedAt '" + entry.confirmed_at + "' is not ISO-8601 UTC");
  if (entry.destination.type == Destination::kPrivate) {
    if (infra.find_server(entry.destination.server) == nullptr)
      throw Error(ErrorCode::kUnknownServer, "server '" + entry.destination.server + "' is not in the infrastructure");
  } else if (!entry.destination.server.empty()) {
    throw Error(ErrorCode::kSchemaError, "only private destinations name a server");
  }
}

// ---------------------------------------------------------------------------
// Operations

inline const RegistryEntry* find_entry(const RegistryFile& reg, std::string_view job_id) {
  for (const auto& e : reg.entries) {
    if (e.job.job_id == job_id) return &e;
  }
  return nullptr;
}

/// Case-sensitive lookup; NotRegistered when absent.
inline const RegistryEntry& lookup(const RegistryFile& reg, std::string_view job_id) {
  if (const auto* e = find_entry(reg, job_id)) return *e;
  throw Error(ErrorCode::kNotRegistered, "job '" + std::string(job_id) + "' is not registered");
}

/// Inserts or replaces by job id and bumps the revision.
inline RegistryFile upsert(RegistryFile reg, RegistryEntry entry) {
  validate_entry(entry, reg.infrastructure);
  bool replaced = false;
  for (auto& e : reg.entries) {
    if (e.job.job_id == entry.job.job_id) {
      e = entry;
      replaced = true;
    }
  }
  if (!replaced) reg.entries.push_back(std::move(entry));
  ++reg.revision;
  return reg;
}

/// Replaces infrastructure and thresholds; existing private placements must
/// still resolve.
inline RegistryFile replace_infrastructure(RegistryFile reg, InfrastructureSpec infra,
                                           SignificanceThresholds thresholds) {
  validate_infrastructure(infra);
  for (const auto& e : reg.entries) {
    if (e.destination.type == Destination::kPrivate && infra.find_server(e.destination.server) == nullptr)
      throw Error(ErrorCode::kUnknownServer,
                  "job '" + e.job.job_id + "' is placed on server '" + e.destination.server + "'");
  }
  reg.infrastructure = std::move(infra);
  reg.thresholds = thresholds;
  ++reg.revision;
  return reg;
}

// ---------------------------------------------------------------------------
// XML

inline std::string serialize(const RegistryFile& reg) {
  using xml::format_number;
  xml::Writer w;
  w.open("igca", {{"version", "1"}, {"revision", std::to_string(reg.revision)}});
  w.open("infrastructure");
  const auto& infra = reg.infrastructure;
  for (const auto& m : infra.machines) {
    w.empty("machine", {{"id", m.id},
                        {"powerW", format_number(m.active_power_w)},
                        {"diskGb", format_number(m.disk_capacity_gb)},
                        {"diskPowerW", format_number(m.disk_power_w)}});
  }
  for (const auto& s : infra.servers) {
    w.empty("server", {{"id", s.id},
                       {"function", std::string(to_string(s.function))},
                       {"frequency", std::string(to_string(s.usage_frequency))},
                       {"mode", std::string(to_string(s.mode))},
                       {"capacityMbps", format_number(s.capacity_mbps)},
                       {"powerW", format_number(s.power_w)},
                       {"diskGb", format_number(s.disk_capacity_gb)},
                       {"diskPowerW", format_number(s.disk_power_w)},
                       {"users", std::to_string(s.concurrent_users)}});
  }
  auto write_path = [&](std::string_view scope, const std::vector<NetworkElement>& elements) {
    if (elements.empty()) {
      w.empty("path", {{"scope", std::string(scope)}});
      return;
    }
    w.open("path", {{"scope", std::string(scope)}});
    for (const auto& e : elements) {
      w.empty("element", {{"name", e.name},
                          {"powerW", format_number(e.power_w)},
                          {"capacityMbps", format_number(e.capacity_mbps)}});
    }
    w.close("path");
  };
  write_path("private", infra.private_path);
  write_path("public", infra.public_path);
  w.empty("coefficients", {{"contentServerJPerMb", format_number(infra.content_server_j_per_mb)},
                           {"transportOverrideJPerMb", format_number(infra.transport_override_j_per_mb)}});
  const auto& t = reg.thresholds;
  w.empty("thresholds", {{"highFrameRateMbps", format_number(t.high_frame_rate_mbps)},
                         {"fewUsersPerServer", format_number(t.few_users_per_server)},
                         {"lowDownloadsPerHour", format_number(t.low_downloads_per_hour)},
                         {"highDownloadsPerHour", format_number(t.high_downloads_per_hour)},
                         {"mediumEncodingsPerWeek", format_number(t.medium_encodings_per_week)}});
  w.close("infrastructure");

  if (reg.entries.empty()) {
    w.empty("jobs", {});
  } else {
    w.open("jobs");
    for (const auto& e : reg.entries) {
      const auto& j = e.job;
      w.open("job", {{"id", j.job_id},
                     {"name", j.name},
                     {"dept", j.dept},
                     {"class", std::string(to_string(j.service_class))},
                     {"frequency", std::string(to_string(j.frequency))}});
      w.empty("profile", {{"fileSizeGb", format_number(j.file_size_gb)},
                          {"downloadsPerHour", format_number(j.downloads_per_hour)},
                          {"users", format_number(j.users)},
                          {"frameRateMbps", format_number(j.frame_rate_mbps)},
                          {"encodingsPerWeek", format_number(j.encodings_per_week)},
                          {"hoursPerEncoding", format_number(j.hours_per_encoding)},
                          {"hoursPerWeek", format_number(j.hours_per_week)},
                          {"bandwidthMbps", format_number(j.bandwidth_req_mbps)}});
      const auto& p = e.policy;
      w.empty("policy", {{"securityLevel", std::to_string(p.security_level)},
                         {"qos", std::string(to_string(p.qos_tier))},
                         {"budget", format_number(p.budget)},
                         {"availability", format_number(p.availability_req)}});
      if (e.destination.type == Destination::kPrivate) {
        w.empty("destination", {{"type", "private"}, {"server", e.destination.server}});
      } else {
        w.empty("destination", {{"type", std::string(to_string(e.destination.type))}});
      }
      w.empty("audit", {{"confirmedBy", e.confirmed_by}, {"confirmedAt", e.confirmed_at}});
      w.close("job");
    }
    w.close("jobs");
  }

  if (!reg.reported.empty()) {
    w.open("reported");
    for (const auto& r : reg.reported) {
      w.empty("value", {{"job", r.job_id},
                        {"destination", std::string(to_string(r.destination))},
                        {"nominalW", format_number(r.nominal_w)}});
    }
    w.close("reported");
  }
  w.close("igca");
  return w.str();
}

namespace detail {

template <typename T>
T parse_enum(const xml::Node& node, std::string_view attr, std::optional<T> (*parser)(std::string_view)) {
  const std::string text = node.attr(attr);
  auto v = parser(text);
  if (!v) node.fail("attribute '" + std::string(attr) + "' has unknown value '" + text + "'");
  return *v;
}

/// Runs a domain validator and reports its failure as a schema error on `node`.
template <typename F>
void check_on(const xml::Node& node, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaError) throw;
    node.fail(e.what());
  }
}

inline NetworkElement parse_element(const xml::Node& n) {
  n.allow_attributes({"name", "powerW", "capacityMbps"});
  NetworkElement e{n.attr("name"), n.number("powerW"), n.number("capacityMbps")};
  check_on(n, [&] { validate(e); });
  return e;
}

inline void parse_infrastructure(const xml::Node& node, RegistryFile& reg) {
  node.allow_attributes({});
  auto& infra = reg.infrastructure;
  bool seen_private = false, seen_public = false, seen_coeff = false, seen_thresholds = false;
  for (const auto& c : node.children()) {
    if (c.name() == "machine") {
      c.allow_attributes({"id", "powerW", "diskGb", "diskPowerW"});
      MachineSpec m{c.attr("id"), c.number("powerW"), c.number("diskGb"), c.number("diskPowerW")};
      check_on(c, [&] { validate(m); });
      infra.machines.push_back(std::move(m));
    } else if (c.name() == "server") {
      c.allow_attributes({"id", "function", "frequency", "mode", "capacityMbps", "powerW", "diskGb", "diskPowerW",
                          "users"});
      ServerSpec s;
      s.id = c.attr("id");
      s.function = parse_enum(c, "function", &parse_server_function);
      s.usage_frequency = parse_enum(c, "frequency", &parse_frequency);
      s.mode = parse_enum(c, "mode", &parse_server_mode);
      s.capacity_mbps = c.number("capacityMbps");
      s.power_w = c.number("powerW");
      s.disk_capacity_gb = c.number("diskGb");
      s.disk_power_w = c.number("diskPowerW");
      const long long users = c.integer("users");
      if (users < 1 || users > 1000000000) c.fail("users must be >= 1");
      s.concurrent_users = static_cast<unsigned>(users);
      check_on(c, [&] { validate(s); });
      infra.servers.push_back(std::move(s));
    } else if (c.name() == "path") {
      c.allow_attributes({"scope"});
      const std::string scope = c.attr("scope");
      std::vector<NetworkElement>* target = nullptr;
      if (scope == "private" && !seen_private) {
        target = &infra.private_path;
        seen_private = true;
      } else if (scope == "public" && !seen_public) {
        target = &infra.public_path;
        seen_public = true;
      } else {
        c.fail("scope must be a single 'private' or 'public'");
      }
      for (const auto& e : c.children_named("element")) target->push_back(parse_element(e));
    } else if (c.name() == "coefficients" && !seen_coeff) {
      seen_coeff = true;
      c.allow_attributes({"contentServerJPerMb", "transportOverrideJPerMb"});
      infra.content_server_j_per_mb = c.number("contentServerJPerMb");
      infra.transport_override_j_per_mb = c.number_or("transportOverrideJPerMb", 0.0);
      if (infra.content_server_j_per_mb < 0 || infra.transport_override_j_per_mb < 0)
        c.fail("coefficients must be >= 0");
    } else if (c.name() == "thresholds" && !seen_thresholds) {
      seen_thresholds = true;
      c.allow_attributes({"highFrameRateMbps", "fewUsersPerServer", "lowDownloadsPerHour", "highDownloadsPerHour",
                          "mediumEncodingsPerWeek"});
      auto& t = reg.thresholds;
      t.high_frame_rate_mbps = c.number("highFrameRateMbps");
      t.few_users_per_server = c.number("fewUsersPerServer");
      t.low_downloads_per_hour = c.number("lowDownloadsPerHour");
      t.high_downloads_per_hour = c.number("highDownloadsPerHour");
      t.medium_encodings_per_week = c.number("mediumEncodingsPerWeek");
    } else {
      c.fail("unexpected element inside <infrastructure>");
    }
  }
  check_on(node, [&] { validate_infrastructure(infra); });
}

inline RegistryEntry parse_job(const xml::Node& node) {
  node.allow_attributes({"id", "name", "dept", "class", "frequency"});
  RegistryEntry entry;
  auto& job = entry.job;
  job.job_id = node.attr("id");
  job.name = node.attr("name");
  job.dept = node.attr("dept");
  job.service_class = parse_enum(node, "class", &parse_service_class);
  job.frequency = parse_enum(node, "frequency", &parse_frequency);

  const auto kids = node.children();
  static constexpr std::string_view kOrder[] = {"profile", "policy", "destination", "audit"};
  if (kids.size() != 4) node.fail("expected <profile>, <policy>, <destination>, <audit>");
  for (std::size_t i = 0; i < 4; ++i) {
    if (kids[i].name() != kOrder[i]) kids[i].fail("out of order inside <job id=\"" + job.job_id + "\">");
    if (!kids[i].children().empty()) kids[i].fail("must be empty");
  }

  const auto& prof = kids[0];
  prof.allow_attributes({"fileSizeGb", "downloadsPerHour", "users", "frameRateMbps", "encodingsPerWeek",
                         "hoursPerEncoding", "hoursPerWeek", "bandwidthMbps"});
  job.file_size_gb = prof.number("fileSizeGb");
  job.downloads_per_hour = prof.number("downloadsPerHour");
  job.users = prof.number("users");
  job.frame_rate_mbps = prof.number("frameRateMbps");
  job.encodings_per_week = prof.number("encodingsPerWeek");
  job.hours_per_encoding = prof.number("hoursPerEncoding");
  job.hours_per_week = prof.number("hoursPerWeek");
  job.bandwidth_req_mbps = prof.number("bandwidthMbps");
  check_on(prof, [&] { validate(job); });

  const auto& pol = kids[1];
  pol.allow_attributes({"securityLevel", "qos", "budget", "availability"});
  const long long level = pol.integer("securityLevel");
  if (level < 1 || level > 3) pol.fail("securityLevel must be 1, 2 or 3");
  entry.policy.security_level = static_cast<int>(level);
  entry.policy.qos_tier = parse_enum(pol, "qos", &parse_qos_tier);
  entry.policy.budget = pol.number("budget");
  entry.policy.availability_req = pol.number("availability");
  check_on(pol, [&] { validate(entry.policy); });

  const auto& dest = kids[2];
  dest.allow_attributes({"type", "server"});
  entry.destination.type = parse_enum(dest, "type", &parse_destination);
  auto server = dest.optional_attr("server");
  if (entry.destination.type == Destination::kPrivate) {
    if (!server || server->empty()) dest.fail("private destination requires a server");
    entry.destination.server = *server;
  } else if (server) {
    dest.fail("server is only allowed for private destinations");
  }

  const auto& audit = kids[3];
  audit.allow_attributes({"confirmedBy", "confirmedAt"});
  entry.confirmed_by = audit.attr("confirmedBy");
  entry.confirmed_at = audit.attr("confirmedAt");
  if (!parse_iso8601(entry.confirmed_at)) audit.fail("confirmedAt is not ISO-8601 UTC");
  return entry;
}

}  // namespace detail

/// Strict parse of a registry document.
inline RegistryFile parse_registry(const std::string& text, const std::string& source = "<registry>") {
  const auto doc = xml::parse_document(text, source);
  const auto root = xml::root(doc, "igca");
  root.allow_attributes({"version", "revision"});
  if (root.attr("version") != "1") root.fail("unsupported version");
  const long long revision = root.integer("revision");
  if (revision < 0) root.fail("revision must be >= 0");

  RegistryFile reg;
  reg.revision = static_cast<std::uint64_t>(revision);
  const auto kids = root.children();
  if (kids.size() < 2 || kids.size() > 3 || kids[0].name() != "infrastructure" || kids[1].name() != "jobs" ||
      (kids.size() == 3 && kids[2].name() != "reported"))
    root.fail("expected <infrastructure>, <jobs> and an optional <reported>");

  detail::parse_infrastructure(kids[0], reg);

  kids[1].allow_attributes({});
  std::set<std::string> ids;
  for (const auto& j : kids[1].children_named("job")) {
    RegistryEntry entry = detail::parse_job(j);
    if (!ids.insert(entry.job.job_id).second) j.fail("duplicate job id '" + entry.job.job_id + "'");
    if (entry.destination.type == Destination::kPrivate &&
        reg.infrastructure.find_server(entry.destination.server) == nullptr)
      j.fail("destination names unknown server '" + entry.destination.server + "'");
    reg.entries.push_back(std::move(entry));
  }

  if (kids.size() == 3) {
    kids[2].allow_attributes({});
    for (const auto& v : kids[2].children_named("value")) {
      v.allow_attributes({"job", "destination", "nominalW"});
      ReportedValue r;
      r.job_id = v.attr("job");
      r.destination = detail::parse_enum(v, "destination", &parse_destination);
      r.nominal_w = v.number("nominalW");
      reg.reported.push_back(std::move(r));
    }
  }
  return reg;
}

inline RegistryFile load(const std::filesystem::path& path) {
  return parse_registry(io::read_file(path), path.string());
}

inline void save(const std::filesystem::path& path, const RegistryFile& reg) {
  io::write_file_atomic(path, serialize(reg));
}

/// File-backed registry owned by the service: readers take immutable
/// snapshots, writers are serialized and publish by atomic rename.
class RegistryStore {
 public:
  using Snapshot = std::shared_ptr<const RegistryFile>;

  explicit RegistryStore(std::filesystem::path path) : path_(std::move(path)) { reload_locked(); }

  const std::filesystem::path& path() const { return path_; }

  /// Current snapshot; reloads when the file changed on disk and carries a
  /// different revision.
  Snapshot snapshot() {
    std::lock_guard lock(mu_);
    std::error_code ec;
    const auto mtime = std::filesystem::last_write_time(path_, ec);
    if (!ec && mtime != mtime_) {
      try {
        reload_locked();
      } catch (const Error&) {
        // Keep serving the last good snapshot.
        mtime_ = mtime;
      }
    }
    return current_;
  }

  /// Applies `fn` to the latest state and persists the result.
  template <typename F>
  Snapshot mutate(F&& fn) {
    std::lock_guard writer(write_mu_);
    Snapshot base = snapshot();
    auto next = std::make_shared<const RegistryFile>(fn(*base));
    save(path_, *next);
    std::lock_guard lock(mu_);
    current_ = next;
    std::error_code ec;
    mtime_ = std::filesystem::last_write_time(path_, ec);
    return current_;
  }

 private:
  void reload_locked() {
    std::error_code ec;
    const auto mtime = std::filesystem::last_write_time(path_, ec);
    auto loaded = std::make_shared<const RegistryFile>(load(path_));
    if (!current_ || loaded->revision != current_->revision) current_ = std::move(loaded);
    mtime_ = mtime;
  }

  std::filesystem::path path_;
  std::mutex mu_;
  std::mutex write_mu_;
  Snapshot current_;
  std::filesystem::file_time_type mtime_{};
};

}  // namespace igca
