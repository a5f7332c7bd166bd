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
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "igca/error.hpp"

namespace igca {

enum class Destination { kLocal = 0, kPrivate = 1, kPublic = 2 };
enum class ServiceClass { kStorage, kSoftware, kProcessing };
enum class Frequency { kRare, kIntermittent, kContinuous };
enum class ServerFunction { kStorage, kProcessing, kBackup };
enum class ServerMode { kHeavyDuty, kSleep, kHibernate };
// Declaration order is the tier order: bronze < silver < gold.
enum class QosTier { kBronze, kSilver, kGold };

/// Tie-break and display order for destinations.
inline constexpr std::array<Destination, 3> kAllDestinations = {Destination::kLocal, Destination::kPrivate,
                                                                 Destination::kPublic};

namespace detail {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

inline constexpr NameTable<Destination, 3> kDestinationNames{{
    {Destination::kLocal, "local"}, {Destination::kPrivate, "private"}, {Destination::kPublic, "public"}}};
inline constexpr NameTable<ServiceClass, 3> kServiceClassNames{{
    {ServiceClass::kStorage, "storage"}, {ServiceClass::kSoftware, "software"},
    {ServiceClass::kProcessing, "processing"}}};
inline constexpr NameTable<Frequency, 3> kFrequencyNames{{
    {Frequency::kRare, "rare"}, {Frequency::kIntermittent, "intermittent"}, {Frequency::kContinuous, "continuous"}}};
inline constexpr NameTable<ServerFunction, 3> kServerFunctionNames{{
    {ServerFunction::kStorage, "storage"}, {ServerFunction::kProcessing, "processing"},
    {ServerFunction::kBackup, "backup"}}};
inline constexpr NameTable<ServerMode, 3> kServerModeNames{{
    {ServerMode::kHeavyDuty, "heavy_duty"}, {ServerMode::kSleep, "sleep"}, {ServerMode::kHibernate, "hibernate"}}};
inline constexpr NameTable<QosTier, 3> kQosTierNames{{
    {QosTier::kBronze, "bronze"}, {QosTier::kSilver, "silver"}, {QosTier::kGold, "gold"}}};

template <typename Enum, std::size_t N>
constexpr std::string_view name_of(const NameTable<Enum, N>& table, Enum value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> value_of(const NameTable<Enum, N>& table, std::string_view name) {
  auto it = std::find_if(table.begin(), table.end(), [&](const auto& entry) { return entry.second == name; });
  if (it == table.end()) return std::nullopt;
  return it->first;
}

}  // namespace detail

constexpr std::string_view to_string(Destination v) { return detail::name_of(detail::kDestinationNames, v); }
constexpr std::string_view to_string(ServiceClass v) { return detail::name_of(detail::kServiceClassNames, v); }
constexpr std::string_view to_string(Frequency v) { return detail::name_of(detail::kFrequencyNames, v); }
constexpr std::string_view to_string(ServerFunction v) { return detail::name_of(detail::kServerFunctionNames, v); }
constexpr std::string_view to_string(ServerMode v) { return detail::name_of(detail::kServerModeNames, v); }
constexpr std::string_view to_string(QosTier v) { return detail::name_of(detail::kQosTierNames, v); }

// Parsers return nullopt for unrecognized names; callers choose the error.
inline std::optional<Destination> parse_destination(std::string_view s) {
  return detail::value_of(detail::kDestinationNames, s);
}
inline std::optional<ServiceClass> parse_service_class(std::string_view s) {
  return detail::value_of(detail::kServiceClassNames, s);
}
inline std::optional<Frequency> parse_frequency(std::string_view s) {
  return detail::value_of(detail::kFrequencyNames, s);
}
inline std::optional<ServerFunction> parse_server_function(std::string_view s) {
  return detail::value_of(detail::kServerFunctionNames, s);
}
inline std::optional<ServerMode> parse_server_mode(std::string_view s) {
  return detail::value_of(detail::kServerModeNames, s);
}
inline std::optional<QosTier> parse_qos_tier(std::string_view s) { return detail::value_of(detail::kQosTierNames, s); }

constexpr std::size_t index_of(Destination d) { return static_cast<std::size_t>(d); }

/// Small value-type set over the three destinations.
class DestinationSet {
 public:
  constexpr DestinationSet() = default;
  constexpr DestinationSet(std::initializer_list<Destination> items) {
    for (auto d : items) insert(d);
  }

  static constexpr DestinationSet all() {
    return {Destination::kLocal, Destination::kPrivate, Destination::kPublic};
  }

  constexpr void insert(Destination d) { bits_ |= bit(d); }
  constexpr void erase(Destination d) { bits_ &= static_cast<unsigned>(~bit(d)); }
  constexpr bool contains(Destination d) const { return (bits_ & bit(d)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(contains(Destination::kLocal)) +
           static_cast<std::size_t>(contains(Destination::kPrivate)) +
           static_cast<std::size_t>(contains(Destination::kPublic));
  }
  constexpr unsigned bits() const { return bits_; }
  static constexpr DestinationSet from_bits(unsigned bits) {
    DestinationSet s;
    s.bits_ = bits & 0x7u;
    return s;
  }

  friend constexpr bool operator==(DestinationSet, DestinationSet) = default;

 private:
  static constexpr unsigned bit(Destination d) { return 1u << index_of(d); }
  unsigned bits_ = 0;
};

}  // namespace igca
