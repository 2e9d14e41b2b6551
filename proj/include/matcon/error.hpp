#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace matcon {

enum class ErrorCode {
  InvalidDimensions,
  NodeOutOfRange,
  SelfLoop,
  AsymmetricWeight,
  IndefiniteWeight,
  ZeroWeight,
  NotSymmetric,
  NotPSD,
  NotEigenvectors,
  NegativeDuration,
  DimensionMismatch,
  EmptySignal,
  DwellOutOfBounds,
  PeriodMismatch,
  TooFewPartitions,
  TimeOutOfRange,
  EmptySpan,
  IndexOrder,
  IndexOutOfRange,
  InvalidSignal,
  BadThreshold,
  OracleDivergence,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::NodeOutOfRange: return "NodeOutOfRange";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::AsymmetricWeight: return "AsymmetricWeight";
    case ErrorCode::IndefiniteWeight: return "IndefiniteWeight";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotEigenvectors: return "NotEigenvectors";
    case ErrorCode::NegativeDuration: return "NegativeDuration";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::DwellOutOfBounds: return "DwellOutOfBounds";
    case ErrorCode::PeriodMismatch: return "PeriodMismatch";
    case ErrorCode::TooFewPartitions: return "TooFewPartitions";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::EmptySpan: return "EmptySpan";
    case ErrorCode::IndexOrder: return "IndexOrder";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidSignal: return "InvalidSignal";
    case ErrorCode::BadThreshold: return "BadThreshold";
    case ErrorCode::OracleDivergence: return "OracleDivergence";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace matcon
