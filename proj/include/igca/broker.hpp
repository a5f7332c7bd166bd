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
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "igca/error.hpp"
#include "igca/policy.hpp"
#include "igca/types.hpp"

namespace igca {

/// Carbon Emission Directory entry.
struct CspRecord {
  std::string csp_id;
  ServiceClass service_class = ServiceClass::kStorage;
  double carbon_intensity = 0.0;  // gCO2 per kWh
  double energy_per_unit = 0.0;   // kWh per service-unit-hour
  std::string region;

  friend bool operator==(const CspRecord&, const CspRecord&) = default;
};

/// UTC hour range [start_hour, end_hour).
struct GreenWindow {
  int start_hour = 0;
  int end_hour = 24;

  bool contains(int hour) const { return hour >= start_hour && hour < end_hour; }

  friend bool operator==(const GreenWindow&, const GreenWindow&) = default;
};

/// Green Cloud Offers entry (also known as the Green Offer Directory).
struct GreenOffer {
  std::string offer_id;
  std::string csp_id;
  ServiceClass service_class = ServiceClass::kStorage;
  double price = 0.0;
  QosTier qos_tier = QosTier::kBronze;
  double availability = 0.0;
  std::vector<GreenWindow> green_windows;

  OfferTerms terms() const { return {offer_id, price, qos_tier, availability}; }

  friend bool operator==(const GreenOffer&, const GreenOffer&) = default;
};

struct BrokerDirectory {
  std::vector<CspRecord> ced;
  std::vector<GreenOffer> offers;
  double window_discount = 0.8;

  friend bool operator==(const BrokerDirectory&, const BrokerDirectory&) = default;
};

inline void validate(const CspRecord& r) {
  if (!(r.carbon_intensity >= 0.0) || !(r.energy_per_unit > 0.0))
    throw Error(ErrorCode::kInvalidOffer, "CED record '" + r.csp_id + "' has invalid intensity/energy");
}

inline void validate(const GreenOffer& o) {
  if (!(o.availability >= 0.0 && o.availability <= 1.0))
    throw Error(ErrorCode::kInvalidOffer, "offer '" + o.offer_id + "' availability must lie in [0, 1]");
  if (!(o.price >= 0.0)) throw Error(ErrorCode::kInvalidOffer, "offer '" + o.offer_id + "' price must be >= 0");
  for (const auto& w : o.green_windows) {
    if (w.start_hour < 0 || w.start_hour >= w.end_hour || w.end_hour > 24)
      throw Error(ErrorCode::kInvalidOffer, "offer '" + o.offer_id + "' has an invalid green window");
  }
}

inline void validate(const BrokerDirectory& dir) {
  for (const auto& r : dir.ced) validate(r);
  for (const auto& o : dir.offers) validate(o);
  if (!(dir.window_discount > 0.0)) throw Error(ErrorCode::kInvalidOffer, "window discount must be > 0");
}

inline const CspRecord* find_csp(const std::vector<CspRecord>& ced, std::string_view csp_id, ServiceClass cls) {
  for (const auto& r : ced) {
    if (r.csp_id == csp_id && r.service_class == cls) return &r;
  }
  return nullptr;
}

/// gCO2 per hour of service: carbon intensity x energy per unit-hour.
inline double carbon_rate(const GreenOffer& offer, const std::vector<CspRecord>& ced) {
  const CspRecord* rec = find_csp(ced, offer.csp_id, offer.service_class);
  if (rec == nullptr)
    throw Error(ErrorCode::kUnlistedCsp, "CSP '" + offer.csp_id + "' has no " +
                                             std::string(to_string(offer.service_class)) + " entry in the CED");
  return rec->carbon_intensity * rec->energy_per_unit;
}

/// Carbon rate after the green-window discount for the given UTC hour.
inline double effective_carbon_rate(const GreenOffer& offer, const BrokerDirectory& dir, int at_hour) {
  double rate = carbon_rate(offer, dir.ced);
  const bool in_window = std::any_of(offer.green_windows.begin(), offer.green_windows.end(),
                                     [&](const GreenWindow& w) { return w.contains(at_hour); });
  return in_window ? rate * dir.window_discount : rate;
}

struct BrokerSelection {
  GreenOffer offer;
  double carbon_rate = 0.0;  // discounted, as compared
};

/// Least-carbon offer of the class passing budget, QoS and availability.
/// Ties go to the lower price, then the lexicographically smaller offer id.
inline BrokerSelection select_greenest(ServiceClass cls, const PolicyEnvelope& policy, const BrokerDirectory& dir,
                                       int at_hour) {
  std::optional<BrokerSelection> best;
  bool any_of_class = false;
  for (const auto& offer : dir.offers) {
    if (offer.service_class != cls) continue;
    any_of_class = true;
    if (!offer_meets(offer.terms(), policy)) continue;
    const double rate = effective_carbon_rate(offer, dir, at_hour);
    if (!best || std::tie(rate, offer.price, offer.offer_id) <
                     std::tie(best->carbon_rate, best->offer.price, best->offer.offer_id)) {
      best = BrokerSelection{offer, rate};
    }
  }
  if (!any_of_class)
    throw Error(ErrorCode::kNoOffer, "no " + std::string(to_string(cls)) + " offers in the directory");
  if (!best) throw Error(ErrorCode::kNoCompliantOffer, "no " + std::string(to_string(cls)) + " offer meets the policy");
  return *best;
}

}  // namespace igca
