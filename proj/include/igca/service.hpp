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
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "igca/decision.hpp"
#include "igca/json_codec.hpp"
#include "igca/line_server.hpp"
#include "igca/routing.hpp"

namespace igca {

inline int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotRegistered:
    case ErrorCode::kNotFound:
    case ErrorCode::kNoOffer: return 404;
    case ErrorCode::kUnknownServer:
    case ErrorCode::kNoCompliantOffer: return 409;
    case ErrorCode::kIoError: return 500;
    default: return 422;
  }
}

/// JSON management API over the registry, broker and event feed.
class ManagementApi {
 public:
  ManagementApi(RegistryStore& registry, BrokerStore& broker, EventLog& events, Clock clock = system_clock())
      : registry_(registry), broker_(broker), events_(events), clock_(std::move(clock)) {}

  void bind(httplib::Server& server) {
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"status", "ok"}, {"registryRevision", registry_.snapshot()->revision},
                       {"lastEventSeq", events_.last_seq()}});
    });
    server.Get("/jobs", [this](const httplib::Request&, httplib::Response& res) {
      const auto reg = registry_.snapshot();
      nlohmann::json jobs = nlohmann::json::array();
      for (const auto& e : reg->entries) jobs.push_back(codec::to_json(e));
      reply(res, 200, {{"registryRevision", reg->revision}, {"jobs", jobs}});
    });
    server.Post("/jobs", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req.body);
      RegistryEntry entry;
      entry.job = codec::job_from_json(codec::detail::field(body, "job"));
      entry.policy = codec::policy_from_json(body.value("policy", nlohmann::json::object()));
      entry.destination = codec::placement_from_json(codec::detail::field(body, "destination"));
      entry.confirmed_by = body.value("confirmedBy", std::string("api"));
      entry.confirmed_at = format_iso8601(clock_());
      const auto reg = registry_.mutate([&](const RegistryFile& cur) { return upsert(cur, entry); });
      reply(res, 200, {{"registryRevision", reg->revision}, {"entry", codec::to_json(lookup(*reg, entry.job.job_id))}});
    }));
    server.Get(R"(/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto reg = registry_.snapshot();
      const auto& entry = lookup(*reg, req.matches[1].str());
      reply(res, 200, {{"registryRevision", reg->revision}, {"entry", codec::to_json(entry)}});
    }));
    server.Post(R"(/jobs/([^/]+)/estimate)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      estimate(req.matches[1].str(), req.body, res);
    }));
    server.Put(R"(/jobs/([^/]+)/destination)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1].str();
      const auto body = parse_body(req.body);
      const Placement placement = codec::placement_from_json(body);
      const std::string by = body.value("confirmedBy", std::string("api"));
      const auto reg = registry_.mutate([&](const RegistryFile& cur) {
        RegistryEntry entry = lookup(cur, id);
        entry.destination = placement;
        entry.confirmed_by = by;
        entry.confirmed_at = format_iso8601(clock_());
        return upsert(cur, std::move(entry));
      });
      reply(res, 200, {{"registryRevision", reg->revision}, {"entry", codec::to_json(lookup(*reg, id))}});
    }));
    server.Get("/infrastructure", [this](const httplib::Request&, httplib::Response& res) {
      const auto reg = registry_.snapshot();
      auto body = codec::to_json(reg->infrastructure, reg->thresholds);
      body["registryRevision"] = reg->revision;
      reply(res, 200, body);
    });
    server.Put("/infrastructure", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto [infra, thresholds] = codec::infrastructure_from_json(parse_body(req.body));
      const auto reg = registry_.mutate(
          [&](const RegistryFile& cur) { return replace_infrastructure(cur, infra, thresholds); });
      auto body = codec::to_json(reg->infrastructure, reg->thresholds);
      body["registryRevision"] = reg->revision;
      reply(res, 200, body);
    }));
    server.Post("/broker/select", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req.body);
      const auto dir = broker_.snapshot();
      if (!dir) {
        reply(res, 503, {{"error", "BrokerUnavailable"}, {"message", "no broker directory is configured"}});
        return;
      }
      const auto cls = codec::detail::enum_field(body, "class", &parse_service_class);
      const auto policy = codec::policy_from_json(body);
      const int hour = at_hour(body);
      reply(res, 200, codec::to_json(select_greenest(cls, policy, *dir, hour)));
    }));
    server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) { stream_events(req, res); });
  }

 private:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static nlohmann::json parse_body(const std::string& raw) {
    if (raw.empty()) return nlohmann::json::object();
    auto j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kSchemaError, "request body must be a JSON object");
    return j;
  }

  /// Maps library errors onto HTTP statuses.
  static Handler guarded(Handler inner) {
    return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
      try {
        inner(req, res);
      } catch (const Error& e) {
        reply(res, http_status_for(e.code()), {{"error", std::string(to_string(e.code()))}, {"message", e.what()}});
      } catch (const nlohmann::json::exception& e) {
        reply(res, 422, {{"error", "SchemaError"}, {"message", e.what()}});
      }
    };
  }

  int at_hour(const nlohmann::json& body) const {
    if (body.contains("atHour")) {
      const double h = codec::detail::number(body, "atHour");
      if (h < 0 || h > 23 || h != static_cast<int>(h)) throw Error(ErrorCode::kSchemaError, "atHour must be 0..23");
      return static_cast<int>(h);
    }
    return utc_hour(clock_());
  }

  void estimate(const std::string& id, const std::string& raw, httplib::Response& res) {
    const auto body = parse_body(raw);
    const auto reg = registry_.snapshot();
    const RegistryEntry* stored = find_entry(*reg, id);
    if (!stored && !body.contains("job")) throw Error(ErrorCode::kNotRegistered, "job '" + id + "' is not registered");

    JobProfile job;
    if (body.contains("job")) {
      auto j = body.at("job");
      if (j.is_object()) j["jobId"] = id;
      job = codec::job_from_json(j);
    } else {
      job = stored->job;
    }
    PolicyEnvelope policy = stored ? stored->policy : PolicyEnvelope{};
    if (body.contains("policy")) policy = codec::policy_from_json(body.at("policy"));

    const auto dir = broker_.snapshot();
    const auto offer = try_select_greenest(job.service_class, policy, dir.get(), at_hour(body));
    try {
      auto decision = what_if(job, policy, reg->infrastructure, offer, reg->thresholds);
      auto out = codec::to_json(decision);
      out["registryRevision"] = reg->revision;
      reply(res, 200, out);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoCompliantDestination) throw;
      reply(res, 422, {{"error", std::string(to_string(e.code()))},
                       {"message", e.what()},
                       {"jobId", id},
                       {"estimates", codec::to_json(estimate_all(job, reg->infrastructure))},
                       {"compliant", nlohmann::json::array()},
                       {"registryRevision", reg->revision}});
    }
  }

  /// Server-sent events from `since` (query or Last-Event-ID). With
  /// follow=0 the backlog is sent and the stream ends.
  void stream_events(const httplib::Request& req, httplib::Response& res) {
    std::uint64_t since = 0;
    if (req.has_header("Last-Event-ID")) since = std::stoull(req.get_header_value("Last-Event-ID"));
    if (req.has_param("since")) since = std::stoull(req.get_param_value("since"));
    const bool follow = !(req.has_param("follow") && req.get_param_value("follow") == "0");
    auto cursor = std::make_shared<std::uint64_t>(since);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, cursor, follow](std::size_t, httplib::DataSink& sink) {
      auto batch = follow ? events_.wait_since(*cursor, std::chrono::milliseconds(250)) : events_.since(*cursor);
      for (const auto& e : batch) {
        const std::string frame = "id: " + std::to_string(e.seq) + "\nevent: " + std::string(to_string(e.kind)) +
                                  "\ndata: " + to_json(e).dump() + "\n\n";
        if (!sink.write(frame.data(), frame.size())) return false;
        *cursor = e.seq;
      }
      if (!follow || events_.closed()) {
        sink.done();
        return true;
      }
      return sink.is_writable();
    });
  }

  RegistryStore& registry_;
  BrokerStore& broker_;
  EventLog& events_;
  Clock clock_;
};

struct ServiceOptions {
  std::filesystem::path registry_path;
  std::optional<std::filesystem::path> broker_path;
  std::string host = "127.0.0.1";
  unsigned short tcp_port = 7421;
  unsigned short http_port = 7422;
  Clock clock = system_clock();
};

/// The resident service: TCP router plus HTTP management API.
class RoutingService {
 public:
  explicit RoutingService(ServiceOptions options)
      : options_(std::move(options)),
        registry_(options_.registry_path),
        broker_(options_.broker_path ? BrokerStore(*options_.broker_path) : BrokerStore()),
        events_(options_.clock),
        router_(registry_, broker_, events_, options_.clock),
        api_(registry_, broker_, events_, options_.clock) {}

  ~RoutingService() { stop(); }

  void start() {
    tcp_ = std::make_unique<LineServer>([this](std::string_view line) { return router_.handle_line(line); },
                                        options_.host, options_.tcp_port);
    tcp_->start();
    api_.bind(http_);
    http_port_ = options_.http_port == 0 ? http_.bind_to_any_port(options_.host)
                                         : (http_.bind_to_port(options_.host, options_.http_port) ? options_.http_port : -1);
    if (http_port_ < 0) throw Error(ErrorCode::kIoError, "cannot bind HTTP port " + std::to_string(options_.http_port));
    http_thread_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
  }

  void stop() {
    events_.close();
    if (http_thread_.joinable()) {
      http_.stop();
      http_thread_.join();
    }
    if (tcp_) tcp_->stop();
  }

  unsigned short tcp_port() const { return tcp_->port(); }
  unsigned short http_port() const { return static_cast<unsigned short>(http_port_); }
  EventLog& events() { return events_; }
  Router& router() { return router_; }
  RegistryStore& registry() { return registry_; }

 private:
  ServiceOptions options_;
  RegistryStore registry_;
  BrokerStore broker_;
  EventLog events_;
  Router router_;
  ManagementApi api_;
  std::unique_ptr<LineServer> tcp_;
  httplib::Server http_;
  int http_port_ = -1;
  std::thread http_thread_;
};

}  // namespace igca
