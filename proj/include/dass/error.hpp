// Copyright 2026 The DASS Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dass {

enum class ErrorCode {
  TooFewSamples,
  SingularSystem,
  InvalidSample,
  NoConvergence,
  ZeroGradient,
  IllegalSplit,
  NotWeldable,
  NotRegular,
  InvalidBaseMesh,
  UvOutsideChart,
  NotAdjacent,
  DegenerateBBox,
  WouldDegenerate,
  InvalidId,
  NoRootFound,
  EmptyStroke,
  InvalidLayer,
  PhaseError,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the kernel carries one of the codes above so the
/// session layer and the HTTP service can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::IllegalSplit: return "IllegalSplit";
    case ErrorCode::NotWeldable: return "NotWeldable";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::InvalidBaseMesh: return "InvalidBaseMesh";
    case ErrorCode::UvOutsideChart: return "UvOutsideChart";
    case ErrorCode::NotAdjacent: return "NotAdjacent";
    case ErrorCode::DegenerateBBox: return "DegenerateBBox";
    case ErrorCode::WouldDegenerate: return "WouldDegenerate";
    case ErrorCode::InvalidId: return "InvalidId";
    case ErrorCode::NoRootFound: return "NoRootFound";
    case ErrorCode::EmptyStroke: return "EmptyStroke";
    case ErrorCode::InvalidLayer: return "InvalidLayer";
    case ErrorCode::PhaseError: return "PhaseError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace dass
