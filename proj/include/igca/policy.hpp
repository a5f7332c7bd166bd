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

#include <optional>
#include <string>
#include <vector>

#include "igca/energy_model.hpp"
#include "igca/types.hpp"

namespace igca {

struct PolicyEnvelope {
  int security_level = 1;  // 3 = most restricted
  QosTier qos_tier = QosTier::kBronze;
  double budget = 0.0;
  double availability_req = 0.0;
  // Per-job allow-lists for the on-premises destinations.
  bool allow_local = true;
  bool allow_private = true;

  friend bool operator==(const PolicyEnvelope&, const PolicyEnvelope&) = default;
};

inline void validate(const PolicyEnvelope& p) {
  if (p.security_level < 1 || p.security_level > 3)
    throw Error(ErrorCode::kInvalidPolicy, "security level must be 1, 2 or 3");
  if (!(p.availability_req >= 0.0 && p.availability_req <= 1.0))
    throw Error(ErrorCode::kInvalidPolicy, "availability requirement must lie in [0, 1]");
  if (!(p.budget >= 0.0) || !std::isfinite(p.budget)) throw Error(ErrorCode::kInvalidPolicy, "budget must be >= 0");
}

/// The subset of a green offer the compliance check looks at.
struct OfferTerms {
  std::string offer_id;
  double price = 0.0;
  QosTier qos_tier = QosTier::kBronze;
  double availability = 0.0;
};

inline bool offer_meets(const OfferTerms& offer, const PolicyEnvelope& policy) {
  return offer.price <= policy.budget && offer.qos_tier >= policy.qos_tier &&
         offer.availability >= policy.availability_req;
}

struct ComplianceReport {
  DestinationSet allowed;
  std::vector<std::string> exclusions;
};

/// Compliance with the reasons each excluded destination was dropped.
inline ComplianceReport check_compliance(const JobProfile& job, const PolicyEnvelope& policy,
                                         const std::optional<OfferTerms>& offer) {
  validate(policy);
  ComplianceReport report;
  report.allowed = DestinationSet::all();
  auto exclude = [&](Destination d, std::string reason) {
    report.allowed.erase(d);
    report.exclusions.push_back(std::string(to_string(d)) + ": " + std::move(reason));
  };

  if (!policy.allow_local) exclude(Destination::kLocal, "not in the job's allow-list");
  if (!policy.allow_private) exclude(Destination::kPrivate, "not in the job's allow-list");

  if (policy.security_level >= 3) {
    exclude(Destination::kPublic, "security level 3 forbids public placement");
  } else if (!offer) {
    exclude(Destination::kPublic, "no green offer available for " + std::string(to_string(job.service_class)));
  } else if (offer->price > policy.budget) {
    exclude(Destination::kPublic, "offer " + offer->offer_id + " exceeds the budget");
  } else if (offer->qos_tier < policy.qos_tier) {
    exclude(Destination::kPublic, "offer " + offer->offer_id + " is below the required QoS tier");
  } else if (offer->availability < policy.availability_req) {
    exclude(Destination::kPublic, "offer " + offer->offer_id + " is below the required availability");
  }
  return report;
}

inline DestinationSet compliant_destinations(const JobProfile& job, const PolicyEnvelope& policy,
                                             const std::optional<OfferTerms>& offer) {
  return check_compliance(job, policy, offer).allowed;
}

// ---------------------------------------------------------------------------
// Significance advisories

/// Qualitative labels of the significance table mapped to numbers.
struct SignificanceThresholds {
  double high_frame_rate_mbps = 10.0;
  double few_users_per_server = 50.0;
  double low_downloads_per_hour = 1.0;
  double high_downloads_per_hour = 100.0;
  double medium_encodings_per_week = 5.0;

  friend bool operator==(const SignificanceThresholds&, const SignificanceThresholds&) = default;
};

enum class EnergyComponent { kTransport, kStorage, kProcessing };
enum class Significance { kNever, kConditional, kAlways };

constexpr std::string_view to_string(EnergyComponent c) {
  switch (c) {
    case EnergyComponent::kTransport: return "transport";
    case EnergyComponent::kStorage: return "storage";
    case EnergyComponent::kProcessing: return "processing";
  }
  return "?";
}

constexpr std::string_view to_string(Significance s) {
  switch (s) {
    case Significance::kNever: return "never";
    case Significance::kConditional: return "conditional";
    case Significance::kAlways: return "always";
  }
  return "?";
}

struct Advisory {
  ServiceClass service_class = ServiceClass::kStorage;
  EnergyComponent energy_component = EnergyComponent::kTransport;
  Destination deployment = Destination::kPublic;
  Significance significance = Significance::kNever;
  std::string condition;
  bool triggered = false;

  friend bool operator==(const Advisory&, const Advisory&) = default;
};

namespace detail {

enum class Trigger { kNone, kHighFrameRate, kFewUsers, kLowDownloads, kHighDownloads, kMediumEncodings };

struct SignificanceCell {
  ServiceClass service_class;
  EnergyComponent component;
  Destination deployment;
  Significance significance;
  Trigger trigger;
  std::string_view condition;
};

// One cell per (class, component, deployment); the processing-service
// storage cells carry no entry.
inline constexpr SignificanceCell kSignificanceTable[] = {
    {ServiceClass::kSoftware, EnergyComponent::kTransport, Destination::kPublic, Significance::kConditional,
     Trigger::kHighFrameRate, "high frame rates"},
    {ServiceClass::kSoftware, EnergyComponent::kTransport, Destination::kPrivate, Significance::kNever, Trigger::kNone,
     "never"},
    {ServiceClass::kSoftware, EnergyComponent::kStorage, Destination::kPublic, Significance::kNever, Trigger::kNone,
     "never"},
    {ServiceClass::kSoftware, EnergyComponent::kStorage, Destination::kPrivate, Significance::kNever, Trigger::kNone,
     "never"},
    {ServiceClass::kSoftware, EnergyComponent::kProcessing, Destination::kPublic, Significance::kConditional,
     Trigger::kFewUsers, "few users per server"},
    {ServiceClass::kSoftware, EnergyComponent::kProcessing, Destination::kPrivate, Significance::kConditional,
     Trigger::kFewUsers, "few users per server"},
    {ServiceClass::kStorage, EnergyComponent::kTransport, Destination::kPublic, Significance::kAlways, Trigger::kNone,
     "always"},
    {ServiceClass::kStorage, EnergyComponent::kTransport, Destination::kPrivate, Significance::kConditional,
     Trigger::kHighDownloads, "high download rates"},
    {ServiceClass::kStorage, EnergyComponent::kStorage, Destination::kPublic, Significance::kConditional,
     Trigger::kLowDownloads, "low download rates"},
    {ServiceClass::kStorage, EnergyComponent::kStorage, Destination::kPrivate, Significance::kConditional,
     Trigger::kLowDownloads, "low download rates"},
    {ServiceClass::kStorage, EnergyComponent::kProcessing, Destination::kPublic, Significance::kNever, Trigger::kNone,
     "never"},
    {ServiceClass::kStorage, EnergyComponent::kProcessing, Destination::kPrivate, Significance::kConditional,
     Trigger::kHighDownloads, "high download rates"},
    {ServiceClass::kProcessing, EnergyComponent::kTransport, Destination::kPublic, Significance::kConditional,
     Trigger::kMediumEncodings, "medium to high encodings per week"},
    {ServiceClass::kProcessing, EnergyComponent::kTransport, Destination::kPrivate, Significance::kNever,
     Trigger::kNone, "never"},
    {ServiceClass::kProcessing, EnergyComponent::kProcessing, Destination::kPublic, Significance::kConditional,
     Trigger::kMediumEncodings, "medium to high encodings per week"},
    {ServiceClass::kProcessing, EnergyComponent::kProcessing, Destination::kPrivate, Significance::kConditional,
     Trigger::kMediumEncodings, "medium to high encodings per week"},
};

inline bool fires(Trigger trigger, const JobProfile& job, const SignificanceThresholds& t) {
  switch (trigger) {
    case Trigger::kNone: return false;
    case Trigger::kHighFrameRate: return job.frame_rate_mbps > t.high_frame_rate_mbps;
    case Trigger::kFewUsers: return job.users < t.few_users_per_server;
    case Trigger::kLowDownloads: return job.downloads_per_hour < t.low_downloads_per_hour;
    case Trigger::kHighDownloads: return job.downloads_per_hour > t.high_downloads_per_hour;
    case Trigger::kMediumEncodings: return job.encodings_per_week >= t.medium_encodings_per_week;
  }
  return false;
}

}  // namespace detail

/// One advisory per significance-table cell for the job's class at the given
/// deployment, in transport/storage/processing order.
inline std::vector<Advisory> significance_flags(const JobProfile& job, Destination deployment,
                                                const SignificanceThresholds& thresholds = {}) {
  std::vector<Advisory> out;
  if (deployment == Destination::kLocal) return out;
  for (const auto& cell : detail::kSignificanceTable) {
    if (cell.service_class != job.service_class || cell.deployment != deployment) continue;
    Advisory a;
    a.service_class = cell.service_class;
    a.energy_component = cell.component;
    a.deployment = cell.deployment;
    a.significance = cell.significance;
    a.condition = std::string(cell.condition);
    a.triggered = cell.significance == Significance::kAlways ||
                  (cell.significance == Significance::kConditional && detail::fires(cell.trigger, job, thresholds));
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace igca
