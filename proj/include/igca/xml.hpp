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

#include <charconv>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "igca/error.hpp"

// Canonical XML writing and strict reading shared by the registry and broker
// files. Output is byte-stable: fixed attribute order, 2-space indent,
// shortest round-trip number formatting.
namespace igca::xml {

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class Writer {
 public:
  using Attr = std::pair<std::string_view, std::string>;

  void empty(std::string_view tag, std::initializer_list<Attr> attrs) {
    open_tag(tag, attrs);
    out_ << "/>\n";
  }

  void open(std::string_view tag, std::initializer_list<Attr> attrs = {}) {
    open_tag(tag, attrs);
    out_ << ">\n";
    ++depth_;
  }

  void close(std::string_view tag) {
    --depth_;
    indent();
    out_ << "</" << tag << ">\n";
  }

  std::string str() const { return out_.str(); }

 private:
  void indent() {
    for (int i = 0; i < depth_; ++i) out_ << "  ";
  }

  void open_tag(std::string_view tag, std::initializer_list<Attr> attrs) {
    indent();
    out_ << '<' << tag;
    for (const auto& [name, value] : attrs) out_ << ' ' << name << "=\"" << escape(value) << '"';
  }

  std::ostringstream out_;
  int depth_ = 0;
};

/// Read-only view of one element that rejects anything it was not told about.
class Node {
 public:
  using ptree = boost::property_tree::ptree;

  Node(std::string name, const ptree& tree) : name_(std::move(name)), tree_(&tree) {}

  const std::string& name() const { return name_; }

  /// Fails on any attribute outside `allowed`.
  void allow_attributes(std::initializer_list<std::string_view> allowed) const {
    if (auto attrs = tree_->get_child_optional("<xmlattr>")) {
      for (const auto& [key, _] : *attrs) {
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) fail("unexpected attribute '" + key + "'");
      }
    }
  }

  std::optional<std::string> optional_attr(std::string_view attr) const {
    if (auto v = tree_->get_optional<std::string>("<xmlattr>." + std::string(attr))) return *v;
    return std::nullopt;
  }

  std::string attr(std::string_view attr) const {
    auto v = optional_attr(attr);
    if (!v) fail("missing attribute '" + std::string(attr) + "'");
    return *v;
  }

  double number(std::string_view attr) const { return to_number(attr, this->attr(attr)); }

  double number_or(std::string_view attr, double fallback) const {
    auto v = optional_attr(attr);
    return v ? to_number(attr, *v) : fallback;
  }

  long long integer(std::string_view attr) const {
    const std::string text = this->attr(attr);
    long long out = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size())
      fail("attribute '" + std::string(attr) + "' is not an integer");
    return out;
  }

  /// Child elements in document order; stray text is a schema error.
  std::vector<Node> children() const {
    if (!tree_->data().empty()) fail("unexpected text content");
    std::vector<Node> out;
    for (const auto& [key, child] : *tree_) {
      if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
      out.emplace_back(key, child);
    }
    return out;
  }

  /// Children that must all carry the given tag.
  std::vector<Node> children_named(std::string_view tag) const {
    auto out = children();
    for (const auto& c : out) {
      if (c.name() != tag) c.fail("unexpected element inside <" + name_ + ">");
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kSchemaError, "<" + name_ + ">: " + what);
  }

 private:
  double to_number(std::string_view attr, const std::string& text) const {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(out))
      fail("attribute '" + std::string(attr) + "' is not a number");
    return out;
  }

  std::string name_;
  const ptree* tree_;
};

/// Parses a document and returns the owning tree; ParseError carries the line.
inline boost::property_tree::ptree parse_document(const std::string& text, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(source + ": " + e.message(), e.line());
  }
  return tree;
}

/// The single root element of a parsed document, which must be `tag`.
inline Node root(const boost::property_tree::ptree& doc, std::string_view tag) {
  std::optional<Node> found;
  for (const auto& [key, child] : doc) {
    if (key == "<xmlcomment>") continue;
    if (found || key != tag) throw Error(ErrorCode::kSchemaError, "document root must be a single <" + std::string(tag) + ">");
    found.emplace(key, child);
  }
  if (!found) throw Error(ErrorCode::kSchemaError, "document has no <" + std::string(tag) + "> root");
  return *found;
}

}  // namespace igca::xml
