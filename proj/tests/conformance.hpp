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

#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "igca/igca.hpp"
#include "test_support.hpp"

namespace conformance {

/// Replaces ISO-8601 timestamps with a fixed token.
inline std::string normalize_timestamps(const std::string& text) {
  static const std::regex kIso(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)");
  return std::regex_replace(text, kIso, "<ts>");
}

struct SessionResult {
  std::string transcript;       // normalized
  std::vector<std::string> violations;  // replies that disagree with the registry
};

/// True when a decision reply agrees with the entry registered at the
/// revision it reports.
inline bool respects(const igca::RouteResponse& r, const igca::RegistryFile& reg) {
  const auto* e = igca::find_entry(reg, r.job_id);
  if (e == nullptr) return r.action == igca::RouteAction::kUnknownJob;
  switch (e->destination.type) {
    case igca::Destination::kLocal: return r.action == igca::RouteAction::kExecuteLocal && r.cacheable;
    case igca::Destination::kPrivate:
      return r.action == igca::RouteAction::kExecutePrivate && r.server_id == e->destination.server;
    case igca::Destination::kPublic: return r.action == igca::RouteAction::kExecutePublic && r.offer_id.has_value();
  }
  return false;
}

/// Scripted session against a running service on a scratch copy of the
/// case-study fixtures: every action, a missing green offer, a malformed line.
inline SessionResult run_route_session() {
  using namespace igca;
  testing_support::TempDir dir;
  const auto registry_path = testing_support::copy_fixture(dir, "axy.xml");
  const auto broker_path = testing_support::copy_fixture(dir, "broker.xml");

  ServiceOptions opts;
  opts.registry_path = registry_path;
  opts.broker_path = broker_path;
  opts.tcp_port = 0;
  opts.http_port = 0;
  opts.clock = fixed_clock(*parse_iso8601("2026-01-05T12:00:00Z"));
  RoutingService service(opts);
  service.start();

  std::map<std::uint64_t, RegistryFile> by_revision;
  by_revision[service.registry().snapshot()->revision] = *service.registry().snapshot();

  SessionResult result;
  std::ostringstream out;
  LineClient client("127.0.0.1", service.tcp_port());
  auto send = [&](const std::string& line) {
    const std::string reply = client.request(line);
    out << "> " << line << "\n< " << reply << "\n";
    const auto decoded = protocol::decode_reply(reply);
    if (const auto* r = std::get_if<RouteResponse>(&decoded)) {
      auto it = by_revision.find(r->registry_revision);
      if (it == by_revision.end() || !respects(*r, it->second)) result.violations.push_back(reply);
    }
  };
  auto route = [&](const std::string& job, std::optional<std::uint64_t> cached = std::nullopt) {
    send(protocol::encode(RouteRequest{job, "PC-7", cached}));
  };

  route("J-PROCESSING");
  route("J-STORAGE");
  route("J-SOFTWARE");
  route("J-NEW");
  route("J-PROCESSING", 3);

  // The manager moves the processing job to the public cloud; no processing
  // offer fits its budget.
  const auto next = service.registry().mutate([](const RegistryFile& reg) {
    auto e = lookup(reg, "J-PROCESSING");
    e.destination = {Destination::kPublic, ""};
    e.confirmed_at = "2026-01-06T08:00:00Z";
    return upsert(reg, e);
  });
  by_revision[next->revision] = *next;
  out << "# registry revision " << next->revision << "\n";
  route("J-PROCESSING", 3);
  route("J-STORAGE", 4);
  send(R"({"type":"route","jobId":""})");
  send("not json");

  for (const auto& e : service.events().since(0)) out << "# event " << to_json(e).dump() << "\n";
  service.stop();
  result.transcript = normalize_timestamps(out.str());
  return result;
}

inline std::string golden_path(const std::string& name) { return std::string(IGCA_GOLDEN_DIR) + "/" + name; }

}  // namespace conformance
