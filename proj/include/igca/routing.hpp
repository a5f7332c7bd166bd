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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "igca/broker_xml.hpp"
#include "igca/clock.hpp"
#include "igca/json_codec.hpp"
#include "igca/registry.hpp"

namespace igca {

// ---------------------------------------------------------------------------
// Messages

struct RouteRequest {
  std::string job_id;
  std::string client_id;
  std::optional<std::uint64_t> cached_revision;
};

enum class RouteAction { kExecuteLocal, kExecutePrivate, kExecutePublic, kUnknownJob };

constexpr std::string_view to_string(RouteAction a) {
  switch (a) {
    case RouteAction::kExecuteLocal: return "EXECUTE_LOCAL";
    case RouteAction::kExecutePrivate: return "EXECUTE_PRIVATE";
    case RouteAction::kExecutePublic: return "EXECUTE_PUBLIC";
    case RouteAction::kUnknownJob: return "UNKNOWN_JOB";
  }
  return "?";
}

inline std::optional<RouteAction> parse_route_action(std::string_view s) {
  for (auto a : {RouteAction::kExecuteLocal, RouteAction::kExecutePrivate, RouteAction::kExecutePublic,
                 RouteAction::kUnknownJob}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

struct RouteResponse {
  std::string job_id;
  RouteAction action = RouteAction::kUnknownJob;
  std::optional<std::string> server_id;
  std::optional<std::string> offer_id;
  bool cacheable = false;
  std::uint64_t registry_revision = 0;

  friend bool operator==(const RouteResponse&, const RouteResponse&) = default;
};

struct ErrorFrame {
  std::string code;
  std::string message;

  friend bool operator==(const ErrorFrame&, const ErrorFrame&) = default;
};

using RouteReply = std::variant<RouteResponse, ErrorFrame>;

namespace protocol {

using ordered_json = nlohmann::ordered_json;

inline constexpr std::string_view kNoGreenOffer = "NO_GREEN_OFFER";
inline constexpr std::string_view kBrokerUnavailable = "BROKER_UNAVAILABLE";
inline constexpr std::string_view kBadRequest = "BAD_REQUEST";

inline std::string encode(const RouteRequest& r) {
  ordered_json j = {{"type", "route"}, {"jobId", r.job_id}, {"clientId", r.client_id}};
  if (r.cached_revision) j["cachedRevision"] = *r.cached_revision;
  return j.dump();
}

inline std::string encode(const RouteResponse& r) {
  ordered_json j = {{"type", "decision"}, {"jobId", r.job_id}, {"action", to_string(r.action)}};
  if (r.server_id) j["server"] = *r.server_id;
  if (r.offer_id) j["offerId"] = *r.offer_id;
  j["cacheable"] = r.cacheable;
  j["registryRevision"] = r.registry_revision;
  return j.dump();
}

inline std::string encode(const ErrorFrame& e) {
  return ordered_json{{"type", "error"}, {"code", e.code}, {"message", e.message}}.dump();
}

inline std::string encode(const RouteReply& reply) {
  return std::visit([](const auto& r) { return encode(r); }, reply);
}

/// Parses one request line; malformed input raises ProtocolError.
inline RouteRequest decode_request(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kProtocolError, "request is not a JSON object");
  if (!j.contains("type") || j["type"] != "route") throw Error(ErrorCode::kProtocolError, "unsupported message type");
  RouteRequest r;
  if (!j.contains("jobId") || !j["jobId"].is_string() || !j.contains("clientId") || !j["clientId"].is_string())
    throw Error(ErrorCode::kProtocolError, "jobId and clientId must be strings");
  r.job_id = j["jobId"].get<std::string>();
  r.client_id = j["clientId"].get<std::string>();
  if (r.job_id.empty() || r.client_id.empty())
    throw Error(ErrorCode::kProtocolError, "jobId and clientId must be non-empty");
  if (j.contains("cachedRevision") && !j["cachedRevision"].is_null()) {
    if (!j["cachedRevision"].is_number_unsigned())
      throw Error(ErrorCode::kProtocolError, "cachedRevision must be a non-negative integer");
    r.cached_revision = j["cachedRevision"].get<std::uint64_t>();
  }
  return r;
}

/// Parses a reply line as seen by a client.
inline RouteReply decode_reply(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kProtocolError, "reply is not a JSON object");
  if (j.value("type", "") == "error") return ErrorFrame{j.value("code", ""), j.value("message", "")};
  if (j.value("type", "") != "decision") throw Error(ErrorCode::kProtocolError, "unknown reply type");
  RouteResponse r;
  r.job_id = j.value("jobId", "");
  auto action = parse_route_action(j.value("action", ""));
  if (!action) throw Error(ErrorCode::kProtocolError, "unknown action");
  r.action = *action;
  if (j.contains("server")) r.server_id = j["server"].get<std::string>();
  if (j.contains("offerId")) r.offer_id = j["offerId"].get<std::string>();
  r.cacheable = j.value("cacheable", false);
  r.registry_revision = j.value("registryRevision", std::uint64_t{0});
  return r;
}

}  // namespace protocol

// ---------------------------------------------------------------------------
// Event feed

enum class EventKind { kDecision, kUnknownJobNotice, kManagerNotice, kBrokerSelection };

constexpr std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kDecision: return "decision";
    case EventKind::kUnknownJobNotice: return "unknown_job_notice";
    case EventKind::kManagerNotice: return "manager_notice";
    case EventKind::kBrokerSelection: return "broker_selection";
  }
  return "?";
}

struct Event {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kDecision;
  nlohmann::ordered_json payload;
  std::string at;
};

inline nlohmann::ordered_json to_json(const Event& e) {
  return {{"seq", e.seq}, {"kind", to_string(e.kind)}, {"payload", e.payload}, {"at", e.at}};
}

/// Append-only, gap-free event sequence with blocking waits for followers.
class EventLog {
 public:
  explicit EventLog(Clock clock = system_clock()) : clock_(std::move(clock)) {}

  std::uint64_t append(EventKind kind, nlohmann::ordered_json payload) {
    std::lock_guard lock(mu_);
    Event e{events_.size() + 1, kind, std::move(payload), format_iso8601(clock_())};
    events_.push_back(std::move(e));
    cv_.notify_all();
    return events_.back().seq;
  }

  /// Events with seq greater than `after`.
  std::vector<Event> since(std::uint64_t after) const {
    std::lock_guard lock(mu_);
    if (after >= events_.size()) return {};
    return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
  }

  /// Blocks until an event newer than `after` exists, the log closes, or the
  /// timeout elapses.
  std::vector<Event> wait_since(std::uint64_t after, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || events_.size() > after; });
    if (after >= events_.size()) return {};
    return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
  }

  std::uint64_t last_seq() const {
    std::lock_guard lock(mu_);
    return events_.size();
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }

 private:
  Clock clock_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<Event> events_;
  bool closed_ = false;
};

// ---------------------------------------------------------------------------
// Broker snapshot

/// Read-mostly broker directory, optionally backed by a file that is
/// reloaded when it changes on disk.
class BrokerStore {
 public:
  using Snapshot = std::shared_ptr<const BrokerDirectory>;

  BrokerStore() = default;
  explicit BrokerStore(BrokerDirectory dir) : current_(std::make_shared<const BrokerDirectory>(std::move(dir))) {}
  explicit BrokerStore(std::filesystem::path path) : path_(resolve_broker_path(path)) { reload(); }

  /// Null when no directory is configured.
  Snapshot snapshot() {
    std::lock_guard lock(mu_);
    if (path_) {
      std::error_code ec;
      const auto mtime = std::filesystem::last_write_time(*path_, ec);
      if (!ec && mtime != mtime_) {
        try {
          current_ = std::make_shared<const BrokerDirectory>(load_broker(*path_));
        } catch (const Error&) {
          // Keep the last good directory.
        }
        mtime_ = mtime;
      }
    }
    return current_;
  }

  void replace(BrokerDirectory dir) {
    std::lock_guard lock(mu_);
    current_ = std::make_shared<const BrokerDirectory>(std::move(dir));
  }

 private:
  void reload() {
    std::error_code ec;
    mtime_ = std::filesystem::last_write_time(*path_, ec);
    current_ = std::make_shared<const BrokerDirectory>(load_broker(*path_));
  }

  std::mutex mu_;
  std::optional<std::filesystem::path> path_;
  std::filesystem::file_time_type mtime_{};
  Snapshot current_;
};

// ---------------------------------------------------------------------------
// Dispatch

/// Resolves one execution request against a registry snapshot. Events are
/// appended to `events` in the order they are produced.
inline RouteReply handle_request(const RouteRequest& req, const RegistryFile& reg, const BrokerDirectory* broker,
                                 EventLog& events, TimePoint now) {
  using nlohmann::ordered_json;
  const RegistryEntry* entry = find_entry(reg, req.job_id);
  if (entry == nullptr) {
    events.append(EventKind::kUnknownJobNotice,
                  {{"jobId", req.job_id}, {"clientId", req.client_id}, {"recipient", "client"},
                   {"message", "job is not registered; run it on the client PC or the private cloud"}});
    events.append(EventKind::kManagerNotice, {{"jobId", req.job_id}, {"clientId", req.client_id},
                                              {"reason", "unknown_job"},
                                              {"message", "client requested an unregistered job"}});
    return RouteResponse{req.job_id, RouteAction::kUnknownJob, std::nullopt, std::nullopt, false, reg.revision};
  }

  RouteResponse resp{req.job_id, RouteAction::kExecuteLocal, std::nullopt, std::nullopt, false, reg.revision};
  switch (entry->destination.type) {
    case Destination::kLocal:
      resp.action = RouteAction::kExecuteLocal;
      resp.cacheable = true;
      break;
    case Destination::kPrivate:
      resp.action = RouteAction::kExecutePrivate;
      resp.server_id = entry->destination.server;
      break;
    case Destination::kPublic: {
      if (broker == nullptr) {
        events.append(EventKind::kManagerNotice, {{"jobId", req.job_id}, {"clientId", req.client_id},
                                                  {"reason", "broker_unavailable"},
                                                  {"message", "no broker directory is configured"}});
        return ErrorFrame{std::string(protocol::kBrokerUnavailable), "no broker directory is configured"};
      }
      try {
        const auto pick = select_greenest(entry->job.service_class, entry->policy, *broker, utc_hour(now));
        events.append(EventKind::kBrokerSelection, {{"jobId", req.job_id},
                                                    {"clientId", req.client_id},
                                                    {"offerId", pick.offer.offer_id},
                                                    {"csp", pick.offer.csp_id},
                                                    {"carbonRate", pick.carbon_rate}});
        resp.action = RouteAction::kExecutePublic;
        resp.offer_id = pick.offer.offer_id;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoOffer && e.code() != ErrorCode::kNoCompliantOffer &&
            e.code() != ErrorCode::kUnlistedCsp)
          throw;
        events.append(EventKind::kManagerNotice, {{"jobId", req.job_id}, {"clientId", req.client_id},
                                                  {"reason", "no_green_offer"}, {"message", e.what()}});
        return ErrorFrame{std::string(protocol::kNoGreenOffer), e.what()};
      }
      break;
    }
  }

  ordered_json payload = {{"jobId", resp.job_id}, {"clientId", req.client_id}, {"action", to_string(resp.action)}};
  if (resp.server_id) payload["server"] = *resp.server_id;
  if (resp.offer_id) payload["offerId"] = *resp.offer_id;
  payload["registryRevision"] = resp.registry_revision;
  events.append(EventKind::kDecision, std::move(payload));
  return resp;
}

/// Stateful front of the dispatch: snapshots the stores per request.
class Router {
 public:
  Router(RegistryStore& registry, BrokerStore& broker, EventLog& events, Clock clock = system_clock())
      : registry_(registry), broker_(broker), events_(events), clock_(std::move(clock)) {}

  RouteReply route(const RouteRequest& req) {
    const auto reg = registry_.snapshot();
    const auto broker = broker_.snapshot();
    return handle_request(req, *reg, broker.get(), events_, clock_());
  }

  /// One protocol line in, one protocol line out (no trailing newline).
  std::string handle_line(std::string_view line) {
    RouteRequest req;
    try {
      req = protocol::decode_request(line);
    } catch (const Error& e) {
      return protocol::encode(ErrorFrame{std::string(protocol::kBadRequest), e.what()});
    }
    return protocol::encode(route(req));
  }

 private:
  RegistryStore& registry_;
  BrokerStore& broker_;
  EventLog& events_;
  Clock clock_;
};

// ---------------------------------------------------------------------------
// Client-side cache

enum class CacheVerdict { kServeFromCache, kRevalidate };

/// A cached reply may be reused only if it was cacheable and was issued at the
/// newest registry revision the client has seen.
inline CacheVerdict client_cache_check(const std::optional<RouteResponse>& cached, std::uint64_t last_seen_revision) {
  if (!cached || !cached->cacheable || cached->action != RouteAction::kExecuteLocal) return CacheVerdict::kRevalidate;
  return cached->registry_revision == last_seen_revision ? CacheVerdict::kServeFromCache : CacheVerdict::kRevalidate;
}

/// Per-client store of local-execution directives.
class ClientCache {
 public:
  CacheVerdict check(const std::string& job_id) const {
    auto it = entries_.find(job_id);
    return client_cache_check(it == entries_.end() ? std::nullopt : std::optional(it->second), last_seen_);
  }

  /// Records a reply; a newer revision invalidates everything cached.
  void observe(const RouteResponse& resp) {
    if (resp.registry_revision > last_seen_) {
      entries_.clear();
      last_seen_ = resp.registry_revision;
    }
    if (resp.cacheable && resp.registry_revision == last_seen_) {
      entries_[resp.job_id] = resp;
    } else {
      entries_.erase(resp.job_id);
    }
  }

  std::uint64_t last_seen_revision() const { return last_seen_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, RouteResponse> entries_;
  std::uint64_t last_seen_ = 0;
};

}  // namespace igca
