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

#include <filesystem>
#include <set>
#include <string>

#include "igca/broker.hpp"
#include "igca/file_io.hpp"
#include "igca/xml.hpp"

// Broker directory file: <broker> with <ced> and <offers>, written with the
// same canonical conventions as the registry.
namespace igca {

inline std::string serialize(const BrokerDirectory& dir) {
  using xml::format_number;
  xml::Writer w;
  w.open("broker", {{"version", "1"}, {"windowDiscount", format_number(dir.window_discount)}});
  if (dir.ced.empty()) {
    w.empty("ced", {});
  } else {
    w.open("ced");
    for (const auto& r : dir.ced) {
      w.empty("csp", {{"id", r.csp_id},
                      {"class", std::string(to_string(r.service_class))},
                      {"carbonIntensity", format_number(r.carbon_intensity)},
                      {"energyPerUnit", format_number(r.energy_per_unit)},
                      {"region", r.region}});
    }
    w.close("ced");
  }
  if (dir.offers.empty()) {
    w.empty("offers", {});
  } else {
    w.open("offers");
    for (const auto& o : dir.offers) {
      std::initializer_list<xml::Writer::Attr> attrs = {{"id", o.offer_id},
                                                        {"csp", o.csp_id},
                                                        {"class", std::string(to_string(o.service_class))},
                                                        {"price", format_number(o.price)},
                                                        {"qos", std::string(to_string(o.qos_tier))},
                                                        {"availability", format_number(o.availability)}};
      if (o.green_windows.empty()) {
        w.empty("offer", attrs);
        continue;
      }
      w.open("offer", attrs);
      for (const auto& win : o.green_windows) {
        w.empty("window", {{"start", std::to_string(win.start_hour)}, {"end", std::to_string(win.end_hour)}});
      }
      w.close("offer");
    }
    w.close("offers");
  }
  w.close("broker");
  return w.str();
}

inline BrokerDirectory parse_broker(const std::string& text, const std::string& source = "<broker>") {
  const auto doc = xml::parse_document(text, source);
  const auto root = xml::root(doc, "broker");
  root.allow_attributes({"version", "windowDiscount"});
  if (root.attr("version") != "1") root.fail("unsupported version");

  BrokerDirectory dir;
  dir.window_discount = root.number_or("windowDiscount", 0.8);
  const auto kids = root.children();
  if (kids.size() != 2 || kids[0].name() != "ced" || kids[1].name() != "offers")
    root.fail("expected <ced> followed by <offers>");

  auto class_of = [](const xml::Node& n) {
    auto cls = parse_service_class(n.attr("class"));
    if (!cls) n.fail("unknown class");
    return *cls;
  };

  kids[0].allow_attributes({});
  for (const auto& c : kids[0].children_named("csp")) {
    c.allow_attributes({"id", "class", "carbonIntensity", "energyPerUnit", "region"});
    CspRecord r{c.attr("id"), class_of(c), c.number("carbonIntensity"), c.number("energyPerUnit"),
                c.optional_attr("region").value_or("")};
    if (find_csp(dir.ced, r.csp_id, r.service_class)) c.fail("duplicate CED entry for '" + r.csp_id + "'");
    try {
      validate(r);
    } catch (const Error& e) {
      c.fail(e.what());
    }
    dir.ced.push_back(std::move(r));
  }

  kids[1].allow_attributes({});
  std::set<std::string> ids;
  for (const auto& o : kids[1].children_named("offer")) {
    o.allow_attributes({"id", "csp", "class", "price", "qos", "availability"});
    GreenOffer offer;
    offer.offer_id = o.attr("id");
    offer.csp_id = o.attr("csp");
    offer.service_class = class_of(o);
    offer.price = o.number("price");
    auto qos = parse_qos_tier(o.attr("qos"));
    if (!qos) o.fail("unknown qos tier");
    offer.qos_tier = *qos;
    offer.availability = o.number("availability");
    for (const auto& win : o.children_named("window")) {
      win.allow_attributes({"start", "end"});
      offer.green_windows.push_back(
          {static_cast<int>(win.integer("start")), static_cast<int>(win.integer("end"))});
    }
    if (!ids.insert(offer.offer_id).second) o.fail("duplicate offer id '" + offer.offer_id + "'");
    try {
      validate(offer);
    } catch (const Error& e) {
      o.fail(e.what());
    }
    dir.offers.push_back(std::move(offer));
  }
  return dir;
}

/// Accepts the directory file itself or a directory holding broker.xml.
inline std::filesystem::path resolve_broker_path(const std::filesystem::path& p) {
  std::error_code ec;
  if (std::filesystem::is_directory(p, ec)) return p / "broker.xml";
  return p;
}

inline BrokerDirectory load_broker(const std::filesystem::path& path) {
  const auto file = resolve_broker_path(path);
  return parse_broker(io::read_file(file), file.string());
}

inline void save_broker(const std::filesystem::path& path, const BrokerDirectory& dir) {
  io::write_file_atomic(resolve_broker_path(path), serialize(dir));
}

}  // namespace igca
