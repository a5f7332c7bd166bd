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

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "igca/igca.hpp"

// Command-line front end. Kept in a header so tests can drive run_cli()
// in-process with captured streams.
namespace igca::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kLoadError = 2, kOrderingMismatch = 3, kServiceError = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { kTable, kCsv };

/// Aligned plain-text table, or CSV.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : rows_{std::move(header)} {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out, Format format) const {
    if (format == Format::kCsv) {
      for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
      }
      return;
    }
    std::vector<std::size_t> widths;
    for (const auto& row : rows_) {
      widths.resize(std::max(widths.size(), row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    for (const auto& row : rows_) {
      std::string line;
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::string cell = row[i];
        if (i + 1 < row.size()) cell.resize(widths[i], ' ');
        line += (i ? "  " : "") + cell;
      }
      out << line << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

inline std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

inline std::string general(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Scenario overrides and sweeps

namespace detail {

inline double* job_field(JobProfile& job, const std::string& name) {
  static const std::map<std::string, double JobProfile::*> kFields = {
      {"file_size", &JobProfile::file_size_gb},
      {"file_size_gb", &JobProfile::file_size_gb},
      {"downloads_per_hour", &JobProfile::downloads_per_hour},
      {"downloads", &JobProfile::downloads_per_hour},
      {"users", &JobProfile::users},
      {"frame_rate", &JobProfile::frame_rate_mbps},
      {"frame_rate_mbps", &JobProfile::frame_rate_mbps},
      {"encodings_per_week", &JobProfile::encodings_per_week},
      {"encodings", &JobProfile::encodings_per_week},
      {"hours_per_encoding", &JobProfile::hours_per_encoding},
      {"hours_per_week", &JobProfile::hours_per_week},
  };
  auto it = kFields.find(name);
  return it == kFields.end() ? nullptr : &(job.*(it->second));
}

/// Fields a scenario of the given class may override.
inline bool field_valid_for(ServiceClass cls, const std::string& name) {
  static const std::map<ServiceClass, std::vector<std::string>> kAllowed = {
      {ServiceClass::kStorage, {"file_size", "file_size_gb", "downloads_per_hour", "downloads", "users"}},
      {ServiceClass::kSoftware, {"file_size", "file_size_gb", "frame_rate", "frame_rate_mbps", "users"}},
      {ServiceClass::kProcessing,
       {"encodings_per_week", "encodings", "hours_per_encoding", "hours_per_week", "frame_rate", "frame_rate_mbps"}},
  };
  const auto& allowed = kAllowed.at(cls);
  return std::find(allowed.begin(), allowed.end(), name) != allowed.end();
}

inline double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + what + ": '" + text + "'");
  }
}

inline void apply_override(JobProfile& job, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("override must be field=value: '" + assignment + "'");
  const std::string name = assignment.substr(0, eq);
  double* field = job_field(job, name);
  if (field == nullptr || !field_valid_for(job.service_class, name))
    throw UsageError("field '" + name + "' cannot be overridden for a " +
                     std::string(to_string(job.service_class)) + " scenario");
  *field = parse_double(assignment.substr(eq + 1), name);
}

struct Sweep {
  std::string field;
  std::vector<double> values;
};

/// "field=a..b:step"
inline Sweep parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  const auto dots = spec.find("..");
  const auto colon = spec.rfind(':');
  if (eq == std::string::npos || dots == std::string::npos || colon == std::string::npos || dots < eq ||
      colon < dots)
    throw UsageError("sweep must look like field=a..b:step");
  Sweep s;
  s.field = spec.substr(0, eq);
  const double a = parse_double(spec.substr(eq + 1, dots - eq - 1), "sweep start");
  const double b = parse_double(spec.substr(dots + 2, colon - dots - 2), "sweep end");
  const double step = parse_double(spec.substr(colon + 1), "sweep step");
  if (!(step > 0) || b < a) throw UsageError("sweep needs a positive step and end >= start");
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(a + static_cast<double>(i) * step);
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Context shared by subcommands

struct Context {
  std::string registry;
  std::string broker;
  std::string clock;
  std::string format = "table";
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;

  Format fmt() const { return format == "csv" ? Format::kCsv : Format::kTable; }

  std::filesystem::path registry_path() const {
    if (!registry.empty()) return registry;
    if (const char* env = std::getenv("IGCA_REGISTRY")) return env;
    throw UsageError("no registry: pass --registry/--fixture or set IGCA_REGISTRY");
  }

  std::optional<std::filesystem::path> broker_path() const {
    if (!broker.empty()) return std::filesystem::path(broker);
    if (const char* env = std::getenv("IGCA_BROKER_DIR")) return std::filesystem::path(env);
    return std::nullopt;
  }

  TimePoint now() const {
    if (clock.empty()) return std::chrono::system_clock::now();
    auto tp = parse_iso8601(clock);
    if (!tp) throw UsageError("--clock must be ISO-8601 UTC, e.g. 2026-01-01T00:00:00Z");
    return *tp;
  }

  std::optional<BrokerDirectory> load_broker_dir() const {
    auto p = broker_path();
    if (!p) return std::nullopt;
    return load_broker(*p);
  }
};

inline const RegistryEntry& scenario_entry(const RegistryFile& reg, const std::string& name) {
  auto cls = parse_service_class(name);
  if (!cls) throw UsageError("unknown scenario '" + name + "' (storage, software, processing)");
  std::string upper = "J-" + name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (const auto* e = find_entry(reg, upper)) return *e;
  for (const auto& e : reg.entries) {
    if (e.job.service_class == *cls) return e;
  }
  throw Error(ErrorCode::kNotRegistered, "fixture has no " + name + " job");
}

/// Placement recommendation, or "none" when nothing is compliant.
struct WhatIfRow {
  EstimateSet estimates;
  DestinationSet compliant;
  std::string recommendation;
};

inline WhatIfRow evaluate(const JobProfile& job, const PolicyEnvelope& policy, const RegistryFile& reg,
                          const BrokerDirectory* broker, int hour) {
  WhatIfRow row;
  const auto offer = try_select_greenest(job.service_class, policy, broker, hour);
  std::optional<OfferTerms> terms;
  if (offer) terms = offer->offer.terms();
  row.compliant = compliant_destinations(job, policy, terms);
  row.estimates = estimate_all(job, reg.infrastructure);
  try {
    row.recommendation = std::string(to_string(decide(job, row.estimates, row.compliant).chosen));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoCompliantDestination) throw;
    row.recommendation = "none";
  }
  return row;
}

inline int cmd_scenario(const Context& ctx, const std::string& name, const std::vector<std::string>& overrides,
                        const std::string& sweep_spec) {
  const auto reg = load(ctx.registry_path());
  const auto broker = ctx.load_broker_dir();
  const int hour = utc_hour(ctx.now());
  const RegistryEntry& entry = scenario_entry(reg, name);
  JobProfile job = entry.job;
  for (const auto& o : overrides) detail::apply_override(job, o);
  auto& out = *ctx.out;

  if (!sweep_spec.empty()) {
    auto sweep = detail::parse_sweep(sweep_spec);
    if (!detail::field_valid_for(job.service_class, sweep.field))
      throw UsageError("field '" + sweep.field + "' cannot be swept for a " + name + " scenario");
    Table t({sweep.field, "local", "private", "public", "recommendation"});
    for (double v : sweep.values) {
      JobProfile point = job;
      *detail::job_field(point, sweep.field) = v;
      const auto row = evaluate(point, entry.policy, reg, broker ? &*broker : nullptr, hour);
      t.add({general(v), fixed2(row.estimates[0].value), fixed2(row.estimates[1].value),
             fixed2(row.estimates[2].value), row.recommendation});
    }
    if (ctx.fmt() == Format::kTable) out << "scenario " << name << " (" << job.job_id << ") sweep " << sweep.field << "\n";
    t.print(out, ctx.fmt());
    return kOk;
  }

  const auto row = evaluate(job, entry.policy, reg, broker ? &*broker : nullptr, hour);
  Table t({"destination", "estimate_nominal_w", "compliant"});
  for (auto d : kAllDestinations) {
    t.add({std::string(to_string(d)), fixed2(row.estimates[index_of(d)].value),
           row.compliant.contains(d) ? "yes" : "no"});
  }
  if (ctx.fmt() == Format::kTable) out << "scenario " << name << " (" << job.job_id << ")\n";
  t.print(out, ctx.fmt());
  if (ctx.fmt() == Format::kTable) out << "recommendation: " << row.recommendation << "\n";
  return kOk;
}

/// Destinations ordered by ascending value; equal values keep tie-break order.
inline std::vector<Destination> ordering(const std::array<double, 3>& values) {
  std::vector<Destination> order(kAllDestinations.begin(), kAllDestinations.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](Destination a, Destination b) { return values[index_of(a)] < values[index_of(b)]; });
  return order;
}

inline std::string ordering_text(const std::vector<Destination>& order) {
  std::string s;
  for (std::size_t i = 0; i < order.size(); ++i) s += (i ? " < " : "") + std::string(to_string(order[i]));
  return s;
}

inline int cmd_table3(const Context& ctx) {
  const auto reg = load(ctx.registry_path());
  auto& out = *ctx.out;
  Table t({"job", "destination", "estimate_nominal_w", "reported_nominal_w", "residual"});
  std::vector<std::string> order_lines;
  bool mismatch = false;
  for (const auto& entry : reg.entries) {
    std::array<std::optional<double>, 3> reported;
    for (const auto& r : reg.reported) {
      if (r.job_id == entry.job.job_id) reported[index_of(r.destination)] = r.nominal_w;
    }
    if (!reported[0] || !reported[1] || !reported[2]) continue;
    const auto est = estimate_all(entry.job, reg.infrastructure);
    std::array<double, 3> computed{}, reported_values{};
    for (auto d : kAllDestinations) {
      computed[index_of(d)] = est[index_of(d)].value;
      reported_values[index_of(d)] = *reported[index_of(d)];
      t.add({entry.job.job_id, std::string(to_string(d)), fixed2(computed[index_of(d)]),
             fixed2(reported_values[index_of(d)]), fixed2(computed[index_of(d)] - reported_values[index_of(d)])});
    }
    const auto mine = ordering(computed), theirs = ordering(reported_values);
    const bool ok = mine == theirs;
    mismatch = mismatch || !ok;
    order_lines.push_back(entry.job.job_id + ": " + ordering_text(mine) + " (reported: " + ordering_text(theirs) +
                          ") " + (ok ? "OK" : "MISMATCH"));
  }
  if (order_lines.empty()) throw Error(ErrorCode::kSchemaError, "fixture carries no reported reference values");
  t.print(out, ctx.fmt());
  if (ctx.fmt() == Format::kTable) {
    out << "\n";
    for (const auto& l : order_lines) out << "ordering " << l << "\n";
  }
  return mismatch ? kOrderingMismatch : kOk;
}

inline int cmd_estimate(const Context& ctx, const std::string& job_id) {
  const auto reg = load(ctx.registry_path());
  const auto broker = ctx.load_broker_dir();
  const auto& entry = lookup(reg, job_id);
  const auto row = evaluate(entry.job, entry.policy, reg, broker ? &*broker : nullptr, utc_hour(ctx.now()));
  Table t({"destination", "estimate_nominal_w", "compliant"});
  for (auto d : kAllDestinations) {
    t.add({std::string(to_string(d)), fixed2(row.estimates[index_of(d)].value),
           row.compliant.contains(d) ? "yes" : "no"});
  }
  t.print(*ctx.out, ctx.fmt());
  if (ctx.fmt() == Format::kTable) {
    *ctx.out << "recommendation: " << row.recommendation << "\n";
    for (auto d : {Destination::kPrivate, Destination::kPublic}) {
      for (const auto& a : significance_flags(entry.job, d, reg.thresholds)) {
        if (a.triggered)
          *ctx.out << "advisory: " << to_string(a.energy_component) << " energy significant on " << to_string(d)
                   << " (" << a.condition << ")\n";
      }
    }
  }
  return kOk;
}

inline std::string placement_text(const Placement& p) {
  return p.type == Destination::kPrivate ? "private: " + p.server : std::string(to_string(p.type));
}

inline int cmd_jobs_list(const Context& ctx) {
  const auto reg = load(ctx.registry_path());
  Table t({"id", "name", "class", "destination", "confirmed_by", "confirmed_at"});
  for (const auto& e : reg.entries) {
    t.add({e.job.job_id, e.job.name, std::string(to_string(e.job.service_class)), placement_text(e.destination),
           e.confirmed_by, e.confirmed_at});
  }
  if (ctx.fmt() == Format::kTable) *ctx.out << "revision " << reg.revision << "\n";
  t.print(*ctx.out, ctx.fmt());
  return kOk;
}

inline Placement make_placement(const std::string& type, const std::string& server) {
  auto d = parse_destination(type);
  if (!d) throw UsageError("destination must be local, private or public");
  if (*d == Destination::kPrivate && server.empty()) throw UsageError("a private destination needs a server id");
  if (*d != Destination::kPrivate && !server.empty()) throw UsageError("only private destinations take a server");
  return {*d, server};
}

inline int cmd_jobs_set_destination(const Context& ctx, const std::string& id, const std::string& type,
                                    const std::string& server, const std::string& by) {
  const auto path = ctx.registry_path();
  const auto reg = load(path);
  RegistryEntry entry = lookup(reg, id);
  entry.destination = make_placement(type, server);
  entry.confirmed_by = by;
  entry.confirmed_at = format_iso8601(ctx.now());
  const auto next = upsert(reg, std::move(entry));
  save(path, next);
  *ctx.out << id << " -> " << placement_text(lookup(next, id).destination) << " (revision " << next.revision
           << ")\n";
  return kOk;
}

inline int cmd_jobs_add(const Context& ctx, RegistryEntry entry, const std::string& type,
                        const std::string& server) {
  const auto path = ctx.registry_path();
  const auto reg = load(path);
  entry.destination = make_placement(type, server);
  entry.confirmed_at = format_iso8601(ctx.now());
  const auto next = upsert(reg, entry);
  save(path, next);
  *ctx.out << "registered " << entry.job.job_id << " (revision " << next.revision << ")\n";
  return kOk;
}

inline std::filesystem::path require_broker(const Context& ctx) {
  auto p = ctx.broker_path();
  if (!p) throw UsageError("no broker directory: pass --broker-dir or set IGCA_BROKER_DIR");
  return *p;
}

inline BrokerDirectory load_or_empty_broker(const std::filesystem::path& p) {
  std::error_code ec;
  if (!std::filesystem::exists(resolve_broker_path(p), ec)) return {};
  return load_broker(p);
}

inline int cmd_broker_select(const Context& ctx, const std::string& cls_name, const PolicyEnvelope& policy,
                             std::optional<int> at_hour) {
  auto cls = parse_service_class(cls_name);
  if (!cls) throw UsageError("unknown class '" + cls_name + "'");
  const auto dir = load_broker(require_broker(ctx));
  const int hour = at_hour ? *at_hour : utc_hour(ctx.now());
  const auto pick = select_greenest(*cls, policy, dir, hour);
  if (ctx.fmt() == Format::kCsv) {
    *ctx.out << "offer_id,csp,price,carbon_rate_g_per_h\n"
             << pick.offer.offer_id << "," << pick.offer.csp_id << "," << general(pick.offer.price) << ","
             << general(pick.carbon_rate) << "\n";
  } else {
    *ctx.out << pick.offer.offer_id << "  csp=" << pick.offer.csp_id << "  price=" << general(pick.offer.price)
             << "  carbon_rate=" << general(pick.carbon_rate) << " gCO2/h\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// serve

inline std::atomic<bool> g_stop_requested{false};

inline int cmd_serve(const Context& ctx, const std::string& host, int port, int http_port) {
  if (port <= 0 || port > 65535) throw UsageError("--port must be in 1..65535");
  if (http_port <= 0 || http_port > 65535) throw UsageError("--http-port must be in 1..65535");
  ServiceOptions opts;
  opts.registry_path = ctx.registry_path();
  opts.broker_path = ctx.broker_path();
  opts.host = host;
  opts.tcp_port = static_cast<unsigned short>(port);
  opts.http_port = static_cast<unsigned short>(http_port);
  if (!ctx.clock.empty()) opts.clock = fixed_clock(ctx.now());
  RoutingService service(std::move(opts));
  service.start();
  *ctx.out << "routing on " << host << ":" << service.tcp_port() << ", management API on " << host << ":"
           << service.http_port() << std::endl;
  std::signal(SIGINT, [](int) { g_stop_requested = true; });
  std::signal(SIGTERM, [](int) { g_stop_requested = true; });
  while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.stop();
  return kOk;
}

inline int env_port(const char* name, int fallback) {
  if (const char* v = std::getenv(name)) {
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(name) + " is not a port number");
    }
  }
  return fallback;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Green cloud placement middleware"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  app.add_option("--registry,--fixture", ctx.registry, "Registry XML (default: $IGCA_REGISTRY)");
  app.add_option("--broker-dir", ctx.broker, "Broker directory XML (default: $IGCA_BROKER_DIR)");
  app.add_option("--clock", ctx.clock, "Fixed ISO-8601 UTC time for timestamps and green windows");
  app.add_option("--format", ctx.format, "Output format")->check(CLI::IsMember({"table", "csv"}));

  std::function<int()> action;

  auto* scenario = app.add_subcommand("scenario", "Estimate a case-study scenario");
  std::string scenario_name, sweep;
  std::vector<std::string> overrides;
  scenario->add_option("name", scenario_name, "storage | software | processing")->required();
  scenario->add_option("--set", overrides, "Override a job field, e.g. frame_rate=11.5");
  scenario->add_option("--sweep", sweep, "Sweep a field: field=a..b:step");
  scenario->callback([&] { action = [&] { return cmd_scenario(ctx, scenario_name, overrides, sweep); }; });

  auto* table3 = app.add_subcommand("table3", "Compare estimates against the reported reference table");
  table3->callback([&] { action = [&] { return cmd_table3(ctx); }; });

  auto* est = app.add_subcommand("estimate", "What-if estimate for a registered job");
  std::string est_id;
  est->add_option("job", est_id)->required();
  est->callback([&] { action = [&] { return cmd_estimate(ctx, est_id); }; });

  auto* serve = app.add_subcommand("serve", "Run the routing service");
  std::string host = "127.0.0.1";
  int port = env_port("IGCA_PORT", 7421), http_port = env_port("IGCA_HTTP_PORT", 7422);
  serve->add_option("--host", host);
  serve->add_option("--port", port, "TCP routing port");
  serve->add_option("--http-port", http_port, "HTTP management port");
  serve->callback([&] { action = [&] { return cmd_serve(ctx, host, port, http_port); }; });

  auto* jobs = app.add_subcommand("jobs", "Administer the job registry");
  jobs->require_subcommand(1);
  jobs->fallthrough();
  auto* jobs_list = jobs->add_subcommand("list", "List registered jobs");
  jobs_list->callback([&] { action = [&] { return cmd_jobs_list(ctx); }; });

  auto* jobs_set = jobs->add_subcommand("set-destination", "Confirm a job's destination");
  std::string set_id, set_type, set_server, confirmed_by = "cli";
  jobs_set->add_option("job", set_id)->required();
  jobs_set->add_option("type", set_type, "local | private | public")->required();
  jobs_set->add_option("server", set_server, "Server id for private placements");
  jobs_set->add_option("--confirmed-by", confirmed_by);
  jobs_set->callback(
      [&] { action = [&] { return cmd_jobs_set_destination(ctx, set_id, set_type, set_server, confirmed_by); }; });

  auto* jobs_add = jobs->add_subcommand("add", "Register a job");
  RegistryEntry new_entry;
  std::string add_class, add_freq = "intermittent", add_qos = "bronze", add_dest = "local", add_server;
  jobs_add->add_option("--id", new_entry.job.job_id)->required();
  jobs_add->add_option("--name", new_entry.job.name);
  jobs_add->add_option("--dept", new_entry.job.dept);
  jobs_add->add_option("--class", add_class)->required()->check(CLI::IsMember({"storage", "software", "processing"}));
  jobs_add->add_option("--frequency", add_freq)->check(CLI::IsMember({"rare", "intermittent", "continuous"}));
  jobs_add->add_option("--file-size-gb", new_entry.job.file_size_gb);
  jobs_add->add_option("--downloads-per-hour", new_entry.job.downloads_per_hour);
  jobs_add->add_option("--users", new_entry.job.users);
  jobs_add->add_option("--frame-rate-mbps", new_entry.job.frame_rate_mbps);
  jobs_add->add_option("--encodings-per-week", new_entry.job.encodings_per_week);
  jobs_add->add_option("--hours-per-encoding", new_entry.job.hours_per_encoding);
  jobs_add->add_option("--hours-per-week", new_entry.job.hours_per_week);
  jobs_add->add_option("--bandwidth-mbps", new_entry.job.bandwidth_req_mbps);
  jobs_add->add_option("--security-level", new_entry.policy.security_level)->check(CLI::Range(1, 3));
  jobs_add->add_option("--qos", add_qos)->check(CLI::IsMember({"bronze", "silver", "gold"}));
  jobs_add->add_option("--budget", new_entry.policy.budget);
  jobs_add->add_option("--availability", new_entry.policy.availability_req);
  jobs_add->add_option("--destination", add_dest)->check(CLI::IsMember({"local", "private", "public"}));
  jobs_add->add_option("--server", add_server);
  jobs_add->add_option("--confirmed-by", confirmed_by);
  jobs_add->callback([&] {
    action = [&] {
      new_entry.job.service_class = *parse_service_class(add_class);
      new_entry.job.frequency = *parse_frequency(add_freq);
      new_entry.policy.qos_tier = *parse_qos_tier(add_qos);
      new_entry.confirmed_by = confirmed_by;
      return cmd_jobs_add(ctx, new_entry, add_dest, add_server);
    };
  });

  auto* broker = app.add_subcommand("broker", "Administer and query the green broker directory");
  broker->require_subcommand(1);
  broker->fallthrough();
  auto* add_csp = broker->add_subcommand("add-csp", "Add or replace a Carbon Emission Directory entry");
  CspRecord csp;
  std::string csp_class;
  add_csp->add_option("--id", csp.csp_id)->required();
  add_csp->add_option("--class", csp_class)->required()->check(CLI::IsMember({"storage", "software", "processing"}));
  add_csp->add_option("--intensity", csp.carbon_intensity, "gCO2/kWh")->required();
  add_csp->add_option("--energy", csp.energy_per_unit, "kWh per service-unit-hour")->required();
  add_csp->add_option("--region", csp.region);
  add_csp->callback([&] {
    action = [&] {
      csp.service_class = *parse_service_class(csp_class);
      validate(csp);
      const auto path = require_broker(ctx);
      auto dir = load_or_empty_broker(path);
      std::erase_if(dir.ced, [&](const CspRecord& r) {
        return r.csp_id == csp.csp_id && r.service_class == csp.service_class;
      });
      dir.ced.push_back(csp);
      save_broker(path, dir);
      out << "CED now holds " << dir.ced.size() << " entries\n";
      return static_cast<int>(kOk);
    };
  });

  auto* add_offer = broker->add_subcommand("add-offer", "Add or replace a green cloud offer");
  GreenOffer offer;
  std::string offer_class, offer_qos = "bronze";
  std::vector<std::string> windows;
  add_offer->add_option("--id", offer.offer_id)->required();
  add_offer->add_option("--csp", offer.csp_id)->required();
  add_offer->add_option("--class", offer_class)->required()->check(CLI::IsMember({"storage", "software", "processing"}));
  add_offer->add_option("--price", offer.price)->required();
  add_offer->add_option("--qos", offer_qos)->check(CLI::IsMember({"bronze", "silver", "gold"}));
  add_offer->add_option("--availability", offer.availability)->required();
  add_offer->add_option("--window", windows, "UTC hours start-end, e.g. 2-5");
  add_offer->callback([&] {
    action = [&] {
      offer.service_class = *parse_service_class(offer_class);
      offer.qos_tier = *parse_qos_tier(offer_qos);
      for (const auto& w : windows) {
        const auto dash = w.find('-');
        if (dash == std::string::npos) throw UsageError("window must be start-end");
        offer.green_windows.push_back({static_cast<int>(detail::parse_double(w.substr(0, dash), "window start")),
                                       static_cast<int>(detail::parse_double(w.substr(dash + 1), "window end"))});
      }
      validate(offer);
      const auto path = require_broker(ctx);
      auto dir = load_or_empty_broker(path);
      std::erase_if(dir.offers, [&](const GreenOffer& o) { return o.offer_id == offer.offer_id; });
      dir.offers.push_back(offer);
      save_broker(path, dir);
      out << "directory now holds " << dir.offers.size() << " offers\n";
      return static_cast<int>(kOk);
    };
  });

  auto* select = broker->add_subcommand("select", "Pick the greenest compliant offer");
  std::string sel_class, sel_qos = "bronze";
  PolicyEnvelope sel_policy;
  sel_policy.budget = std::numeric_limits<double>::max();
  std::optional<int> sel_hour;
  select->add_option("--class", sel_class)->required()->check(CLI::IsMember({"storage", "software", "processing"}));
  select->add_option("--budget", sel_policy.budget);
  select->add_option("--qos", sel_qos)->check(CLI::IsMember({"bronze", "silver", "gold"}));
  select->add_option("--availability", sel_policy.availability_req);
  select->add_option("--at-hour", sel_hour)->check(CLI::Range(0, 23));
  select->callback([&] {
    action = [&] {
      sel_policy.qos_tier = *parse_qos_tier(sel_qos);
      return cmd_broker_select(ctx, sel_class, sel_policy, sel_hour);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    return action ? action() : static_cast<int>(kUsage);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kNotFound:
      case ErrorCode::kParseError:
      case ErrorCode::kSchemaError:
      case ErrorCode::kIoError: return kLoadError;
      default: return kServiceError;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kServiceError;
  }
}

}  // namespace igca::cli
