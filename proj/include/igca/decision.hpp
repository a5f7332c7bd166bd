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

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "igca/broker.hpp"
#include "igca/energy_model.hpp"
#include "igca/policy.hpp"

namespace igca {

using EstimateSet = std::array<EnergyEstimate, 3>;  // indexed by Destination

struct PlacementDecision {
  std::string job_id;
  Destination chosen = Destination::kLocal;
  EstimateSet estimates;
  DestinationSet compliant;
  std::vector<std::string> rationale;
  std::vector<Advisory> advisories;
  std::optional<BrokerSelection> offer;
};

namespace detail {

inline std::string format_value(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

}  // namespace detail

/// Filter-then-argmin over the compliant destinations; ties favour
/// local, then private, then public.
inline PlacementDecision decide(const JobProfile& job, const EstimateSet& estimates, DestinationSet compliant) {
  for (auto d : kAllDestinations) {
    if (estimates[index_of(d)].destination != d)
      throw Error(ErrorCode::kUnboundDestination, "estimate set is not ordered local/private/public");
  }
  if (compliant.empty())
    throw Error(ErrorCode::kNoCompliantDestination, "no destination satisfies the policy of job '" + job.job_id + "'");

  PlacementDecision out;
  out.job_id = job.job_id;
  out.estimates = estimates;
  out.compliant = compliant;

  std::optional<Destination> best;
  for (auto d : kAllDestinations) {
    if (!compliant.contains(d)) {
      out.rationale.push_back("filtered " + std::string(to_string(d)));
      continue;
    }
    if (!best || estimates[index_of(d)].value < estimates[index_of(*best)].value) best = d;
  }
  out.chosen = *best;

  std::string cmp = "chose " + std::string(to_string(out.chosen)) + " (" +
                    detail::format_value(estimates[index_of(out.chosen)].value) + ")";
  for (auto d : kAllDestinations) {
    if (d == out.chosen || !compliant.contains(d)) continue;
    const double v = estimates[index_of(d)].value;
    cmp += (v == estimates[index_of(out.chosen)].value ? " = " : " < ") + std::string(to_string(d)) + " (" +
           detail::format_value(v) + ")";
  }
  out.rationale.push_back(std::move(cmp));
  return out;
}

inline EstimateSet estimate_all(const JobProfile& job, const InfrastructureSpec& infra) {
  return {estimate(job, infra, Destination::kLocal), estimate(job, infra, Destination::kPrivate),
          estimate(job, infra, Destination::kPublic)};
}

/// The manager's what-if view: estimates, compliance, advisories and the
/// greenest compliant recommendation. Nothing is persisted.
inline PlacementDecision what_if(const JobProfile& job, const PolicyEnvelope& policy, const InfrastructureSpec& infra,
                                 const std::optional<BrokerSelection>& offer,
                                 const SignificanceThresholds& thresholds = {}) {
  const EstimateSet estimates = estimate_all(job, infra);
  std::optional<OfferTerms> terms;
  if (offer) terms = offer->offer.terms();
  ComplianceReport compliance = check_compliance(job, policy, terms);

  PlacementDecision out = decide(job, estimates, compliance.allowed);
  std::vector<std::string> rationale = std::move(compliance.exclusions);
  rationale.insert(rationale.end(), out.rationale.begin(), out.rationale.end());
  out.rationale = std::move(rationale);
  for (auto d : {Destination::kPrivate, Destination::kPublic}) {
    auto flags = significance_flags(job, d, thresholds);
    out.advisories.insert(out.advisories.end(), flags.begin(), flags.end());
  }
  out.offer = offer;
  return out;
}

/// Broker lookup that maps "no usable offer" to an empty result.
inline std::optional<BrokerSelection> try_select_greenest(ServiceClass cls, const PolicyEnvelope& policy,
                                                          const BrokerDirectory* dir, int at_hour) {
  if (dir == nullptr) return std::nullopt;
  try {
    return select_greenest(cls, policy, *dir, at_hour);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoOffer || e.code() == ErrorCode::kNoCompliantOffer) return std::nullopt;
    throw;
  }
}

}  // namespace igca
