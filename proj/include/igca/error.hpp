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

#include <stdexcept>
#include <string>
#include <string_view>

namespace igca {

enum class ErrorCode {
  kEmptyPath,
  kInvalidElement,
  kInvalidMachine,
  kInvalidServer,
  kInvalidJob,
  kClassMismatch,
  kUnboundDestination,
  kInvalidPolicy,
  kNoCompliantDestination,
  kNotFound,
  kParseError,
  kSchemaError,
  kUnknownServer,
  kNotRegistered,
  kIoError,
  kUnlistedCsp,
  kNoOffer,
  kNoCompliantOffer,
  kInvalidOffer,
  kProtocolError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyPath: return "EmptyPath";
    case ErrorCode::kInvalidElement: return "InvalidElement";
    case ErrorCode::kInvalidMachine: return "InvalidMachine";
    case ErrorCode::kInvalidServer: return "InvalidServer";
    case ErrorCode::kInvalidJob: return "InvalidJob";
    case ErrorCode::kClassMismatch: return "ClassMismatch";
    case ErrorCode::kUnboundDestination: return "UnboundDestination";
    case ErrorCode::kInvalidPolicy: return "InvalidPolicy";
    case ErrorCode::kNoCompliantDestination: return "NoCompliantDestination";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kUnknownServer: return "UnknownServer";
    case ErrorCode::kNotRegistered: return "NotRegistered";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUnlistedCsp: return "UnlistedCsp";
    case ErrorCode::kNoOffer: return "NoOffer";
    case ErrorCode::kNoCompliantOffer: return "NoCompliantOffer";
    case ErrorCode::kInvalidOffer: return "InvalidOffer";
    case ErrorCode::kProtocolError: return "ProtocolError";
  }
  return "Unknown";
}

// Every failure surfaced by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures additionally report the offending line (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, unsigned long line)
      : Error(ErrorCode::kParseError, message + " (line " + std::to_string(line) + ")"), line_(line) {}

  unsigned long line() const noexcept { return line_; }

 private:
  unsigned long line_;
};

}  // namespace igca
