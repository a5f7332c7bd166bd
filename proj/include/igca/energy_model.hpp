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

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "igca/error.hpp"
#include "igca/types.hpp"

// Energy model for the three placement destinations. All outputs are
// "nominal watts": each formula is evaluated literally over its configured
// coefficients, and comparisons are only made between destinations of the
// same job.
namespace igca {

namespace units {

inline constexpr double kMegabitsPerGigabyte = 8000.0;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kHoursPerWeek = 168.0;

constexpr double gigabytes_to_megabits(double gb) { return gb * kMegabitsPerGigabyte; }
constexpr double per_hour_to_per_second(double rate) { return rate / kSecondsPerHour; }

/// Bitrate of an uncompressed screen stream, in Mb/s.
constexpr double screen_bitrate_mbps(double width, double height, double color_bits, double frames_per_second) {
  return width * height * color_bits * frames_per_second / 1.0e6;
}

}  // namespace units

struct NetworkElement {
  std::string name;
  double power_w = 0.0;
  double capacity_mbps = 0.0;

  friend bool operator==(const NetworkElement&, const NetworkElement&) = default;
};

/// Network elements between a client and a destination.
struct TransportPath {
  std::vector<NetworkElement> elements;
  /// E_ContentServer, same unit as the transport intensity.
  double content_server_j_per_mb = 0.0;
  /// When set, replaces the element-derived transport intensity.
  std::optional<double> measured_j_per_mb;

  friend bool operator==(const TransportPath&, const TransportPath&) = default;
};

struct MachineSpec {
  std::string id;
  double active_power_w = 0.0;
  double disk_capacity_gb = 0.0;
  double disk_power_w = 0.0;

  double disk_intensity() const { return disk_power_w / disk_capacity_gb; }

  friend bool operator==(const MachineSpec&, const MachineSpec&) = default;
};

struct ServerSpec {
  std::string id;
  ServerFunction function = ServerFunction::kProcessing;
  Frequency usage_frequency = Frequency::kContinuous;
  ServerMode mode = ServerMode::kHeavyDuty;
  double capacity_mbps = 0.0;
  double power_w = 0.0;
  double disk_capacity_gb = 0.0;
  double disk_power_w = 0.0;
  unsigned concurrent_users = 1;

  double disk_intensity() const { return disk_power_w / disk_capacity_gb; }

  friend bool operator==(const ServerSpec&, const ServerSpec&) = default;
};

/// Scales a server's nameplate power by its operating mode.
struct ModeFactors {
  double heavy_duty = 1.0;
  double sleep = 0.1;
  double hibernate = 0.05;

  double factor(ServerMode mode) const {
    switch (mode) {
      case ServerMode::kHeavyDuty: return heavy_duty;
      case ServerMode::kSleep: return sleep;
      case ServerMode::kHibernate: return hibernate;
    }
    return 1.0;
  }

  friend bool operator==(const ModeFactors&, const ModeFactors&) = default;
};

struct JobProfile {
  std::string job_id;
  std::string name;
  std::string dept;
  ServiceClass service_class = ServiceClass::kStorage;
  double file_size_gb = 0.0;
  double downloads_per_hour = 0.0;
  double users = 0.0;
  double frame_rate_mbps = 0.0;
  double encodings_per_week = 0.0;
  double hours_per_encoding = 0.0;
  double hours_per_week = 0.0;
  double bandwidth_req_mbps = 0.0;
  Frequency frequency = Frequency::kIntermittent;

  friend bool operator==(const JobProfile&, const JobProfile&) = default;
};

struct EnergyTerm {
  std::string name;
  double value = 0.0;

  friend bool operator==(const EnergyTerm&, const EnergyTerm&) = default;
};

enum class Combination { kSum, kProduct };

struct EnergyEstimate {
  Destination destination = Destination::kLocal;
  double value = 0.0;
  Combination combination = Combination::kSum;
  std::vector<EnergyTerm> terms;

  /// Recomputes the value from the terms in their recorded order.
  double recombine() const {
    double acc = combination == Combination::kSum ? 0.0 : 1.0;
    for (const auto& t : terms) acc = combination == Combination::kSum ? acc + t.value : acc * t.value;
    return acc;
  }
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace detail

inline void validate(const NetworkElement& e) {
  if (!(std::isfinite(e.power_w) && e.power_w > 0.0))
    throw Error(ErrorCode::kInvalidElement, "element '" + e.name + "' must have power > 0");
  if (!(std::isfinite(e.capacity_mbps) && e.capacity_mbps > 0.0))
    throw Error(ErrorCode::kInvalidElement, "element '" + e.name + "' must have capacity > 0");
}

inline void validate(const MachineSpec& m) {
  if (!(m.active_power_w > 0.0) || !(m.disk_capacity_gb > 0.0) || !detail::finite_non_negative(m.disk_power_w))
    throw Error(ErrorCode::kInvalidMachine, "machine '" + m.id + "' violates power/disk constraints");
}

inline void validate(const ServerSpec& s) {
  if (!(s.power_w > 0.0)) throw Error(ErrorCode::kInvalidServer, "server '" + s.id + "' must have power > 0");
  if (s.concurrent_users < 1)
    throw Error(ErrorCode::kInvalidServer, "server '" + s.id + "' must serve at least one user");
  if (!(s.disk_capacity_gb > 0.0) || !detail::finite_non_negative(s.disk_power_w) ||
      !detail::finite_non_negative(s.capacity_mbps))
    throw Error(ErrorCode::kInvalidServer, "server '" + s.id + "' violates disk/capacity constraints");
}

inline void validate(const JobProfile& job) {
  const double fields[] = {job.file_size_gb,       job.downloads_per_hour, job.users,
                           job.frame_rate_mbps,    job.encodings_per_week, job.hours_per_encoding,
                           job.hours_per_week,     job.bandwidth_req_mbps};
  for (double f : fields) {
    if (!detail::finite_non_negative(f))
      throw Error(ErrorCode::kInvalidJob, "job '" + job.job_id + "' has a negative or non-finite field");
  }
  if (job.hours_per_week > units::kHoursPerWeek)
    throw Error(ErrorCode::kInvalidJob, "job '" + job.job_id + "' exceeds 168 hours per week");
}

/// True when every workload field the job's class depends on is positive.
inline bool has_class_workload(const JobProfile& job) {
  switch (job.service_class) {
    case ServiceClass::kStorage: return job.file_size_gb > 0 && job.downloads_per_hour > 0 && job.users > 0;
    case ServiceClass::kSoftware: return job.frame_rate_mbps > 0 && job.file_size_gb > 0;
    case ServiceClass::kProcessing:
      return job.encodings_per_week > 0 && job.hours_per_encoding > 0 && job.hours_per_week > 0;
  }
  return false;
}

namespace detail {

inline void require_class(const JobProfile& job, std::initializer_list<ServiceClass> allowed, const char* formula) {
  for (auto c : allowed) {
    if (job.service_class == c) return;
  }
  throw Error(ErrorCode::kClassMismatch, std::string(formula) + " does not apply to " +
                                             std::string(to_string(job.service_class)) + " job '" + job.job_id +
                                             "'");
}

inline double server_power(const ServerSpec& server, const ModeFactors& modes) {
  return server.power_w * modes.factor(server.mode);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Coefficients

/// Sum of power/capacity over the path, in J/Mb.
inline double transport_intensity(const TransportPath& path) {
  if (path.elements.empty()) throw Error(ErrorCode::kEmptyPath, "transport path has no elements");
  double total = 0.0;
  for (const auto& e : path.elements) {
    validate(e);
    total += e.power_w / e.capacity_mbps;
  }
  return total;
}

/// E_Transport as used by the formulas: the measured figure when configured.
inline double effective_transport_intensity(const TransportPath& path) {
  if (path.measured_j_per_mb) {
    if (!detail::finite_non_negative(*path.measured_j_per_mb))
      throw Error(ErrorCode::kInvalidElement, "measured transport intensity must be >= 0");
    return *path.measured_j_per_mb;
  }
  return transport_intensity(path);
}

/// Per-user share of the server's (mode-scaled) power.
inline double server_power_per_user(const ServerSpec& server, const ModeFactors& modes = {}) {
  validate(server);
  return detail::server_power(server, modes) / static_cast<double>(server.concurrent_users);
}

// ---------------------------------------------------------------------------
// Formulas

/// File size x download rate x (transport + content server) x users.
inline EnergyEstimate storage_cloud_power(const JobProfile& job, const TransportPath& path,
                                          Destination destination = Destination::kPrivate) {
  detail::require_class(job, {ServiceClass::kStorage}, "storage_cloud_power");
  validate(job);
  if (!detail::finite_non_negative(path.content_server_j_per_mb))
    throw Error(ErrorCode::kInvalidElement, "content server intensity must be >= 0");
  const double size_mb = units::gigabytes_to_megabits(job.file_size_gb);
  const double rate = units::per_hour_to_per_second(job.downloads_per_hour);
  const double intensity = effective_transport_intensity(path) + path.content_server_j_per_mb;

  EnergyEstimate est;
  est.destination = destination;
  est.combination = Combination::kProduct;
  est.terms = {{"file_size_mb", size_mb},
               {"downloads_per_second", rate},
               {"transport_plus_content_j_per_mb", intensity},
               {"users", job.users}};
  est.value = size_mb * rate * intensity * job.users;
  return est;
}

/// Local machine power plus the disk share of the file.
inline EnergyEstimate storage_local_power(const JobProfile& job, const MachineSpec& machine) {
  detail::require_class(job, {ServiceClass::kStorage, ServiceClass::kSoftware}, "storage_local_power");
  validate(job);
  validate(machine);
  const double disk = job.file_size_gb * machine.disk_intensity();

  EnergyEstimate est;
  est.destination = Destination::kLocal;
  est.combination = Combination::kSum;
  est.terms = {{"local_machine_w", machine.active_power_w}, {"local_disk_w", disk}};
  est.value = machine.active_power_w + disk;
  return est;
}

inline EnergyEstimate software_cloud_power(const JobProfile& job, const MachineSpec& machine,
                                           const ServerSpec& server, const TransportPath& path,
                                           Destination destination = Destination::kPrivate,
                                           const ModeFactors& modes = {}) {
  detail::require_class(job, {ServiceClass::kSoftware}, "software_cloud_power");
  validate(job);
  validate(machine);
  const double per_user = server_power_per_user(server, modes);
  const double transport = job.frame_rate_mbps * effective_transport_intensity(path);
  const double disk = job.file_size_gb * server.disk_intensity();

  EnergyEstimate est;
  est.destination = destination;
  est.combination = Combination::kSum;
  est.terms = {{"local_machine_w", machine.active_power_w},
               {"server_per_user_w", per_user},
               {"frame_transport_w", transport},
               {"server_disk_w", disk}};
  est.value = machine.active_power_w + per_user + transport + disk;
  return est;
}

/// Weekly processing on a remote server; also serves the public destination.
inline EnergyEstimate processing_cloud_energy(const JobProfile& job, const MachineSpec& machine,
                                              const ServerSpec& server, const TransportPath& path,
                                              Destination destination = Destination::kPrivate,
                                              const ModeFactors& modes = {}) {
  detail::require_class(job, {ServiceClass::kProcessing}, "processing_cloud_energy");
  validate(job);
  validate(machine);
  validate(server);
  const double local = machine.active_power_w * job.hours_per_week;
  const double encoding = job.encodings_per_week * job.hours_per_encoding * detail::server_power(server, modes);
  const double transport = job.frame_rate_mbps * effective_transport_intensity(path);

  EnergyEstimate est;
  est.destination = destination;
  est.combination = Combination::kSum;
  est.terms = {{"local_machine_weekly", local}, {"server_encoding", encoding}, {"frame_transport_w", transport}};
  est.value = local + encoding + transport;
  return est;
}

inline EnergyEstimate processing_local_energy(const JobProfile& job, const MachineSpec& machine) {
  detail::require_class(job, {ServiceClass::kProcessing}, "processing_local_energy");
  validate(job);
  validate(machine);

  EnergyEstimate est;
  est.destination = Destination::kLocal;
  est.combination = Combination::kProduct;
  est.terms = {{"local_machine_w", machine.active_power_w}, {"hours_per_week", job.hours_per_week}};
  est.value = machine.active_power_w * job.hours_per_week;
  return est;
}

// ---------------------------------------------------------------------------
// Infrastructure binding

/// Everything the estimator needs about the client site and its network.
struct InfrastructureSpec {
  std::vector<MachineSpec> machines;
  std::vector<ServerSpec> servers;
  std::vector<NetworkElement> private_path;
  std::vector<NetworkElement> public_path;
  double content_server_j_per_mb = 0.0;
  /// Measured LAN intensity for the private path; 0 means "derive from elements".
  double transport_override_j_per_mb = 0.0;
  ModeFactors mode_factors;

  friend bool operator==(const InfrastructureSpec&, const InfrastructureSpec&) = default;

  const ServerSpec* find_server(std::string_view id) const {
    for (const auto& s : servers) {
      if (s.id == id) return &s;
    }
    return nullptr;
  }

  /// The department's PC, else the first registered machine.
  const MachineSpec* machine_for(const JobProfile& job) const {
    for (const auto& m : machines) {
      if (m.id == job.dept) return &m;
    }
    return machines.empty() ? nullptr : &machines.front();
  }

  /// First server whose function suits the class, else first non-backup, else first.
  const ServerSpec* server_for(ServiceClass cls) const {
    const ServerFunction wanted = cls == ServiceClass::kStorage ? ServerFunction::kStorage : ServerFunction::kProcessing;
    for (const auto& s : servers) {
      if (s.function == wanted) return &s;
    }
    for (const auto& s : servers) {
      if (s.function != ServerFunction::kBackup) return &s;
    }
    return servers.empty() ? nullptr : &servers.front();
  }

  /// Transport path for a remote destination; nullopt when none is configured.
  std::optional<TransportPath> path_for(Destination d) const {
    TransportPath path;
    path.content_server_j_per_mb = content_server_j_per_mb;
    if (d == Destination::kPrivate) {
      path.elements = private_path;
      if (transport_override_j_per_mb > 0.0) path.measured_j_per_mb = transport_override_j_per_mb;
    } else if (d == Destination::kPublic) {
      path.elements = public_path;
    } else {
      return std::nullopt;
    }
    if (path.elements.empty() && !path.measured_j_per_mb) return std::nullopt;
    return path;
  }
};

/// Dispatches a job to the formula for its class at the given destination.
/// `server_id` pins a specific private server; otherwise one is chosen by function.
inline EnergyEstimate estimate(const JobProfile& job, const InfrastructureSpec& infra, Destination destination,
                               std::optional<std::string> server_id = std::nullopt) {
  validate(job);
  if (!has_class_workload(job))
    throw Error(ErrorCode::kClassMismatch, "job '" + job.job_id + "' has no workload for its " +
                                               std::string(to_string(job.service_class)) + " class");
  const MachineSpec* machine = infra.machine_for(job);
  if (machine == nullptr) throw Error(ErrorCode::kUnboundDestination, "no local machine configured");

  if (destination == Destination::kLocal) {
    if (job.service_class == ServiceClass::kProcessing) return processing_local_energy(job, *machine);
    return storage_local_power(job, *machine);
  }

  const auto path = infra.path_for(destination);
  if (!path)
    throw Error(ErrorCode::kUnboundDestination,
                "no " + std::string(to_string(destination)) + " transport path configured");
  if (job.service_class == ServiceClass::kStorage) return storage_cloud_power(job, *path, destination);

  const ServerSpec* server = server_id ? infra.find_server(*server_id) : infra.server_for(job.service_class);
  if (server == nullptr)
    throw Error(ErrorCode::kUnboundDestination, "no server bound for " + std::string(to_string(destination)));
  if (job.service_class == ServiceClass::kSoftware)
    return software_cloud_power(job, *machine, *server, *path, destination, infra.mode_factors);
  return processing_cloud_energy(job, *machine, *server, *path, destination, infra.mode_factors);
}

}  // namespace igca
