#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace potkit {

enum class ErrorKind {
  InvalidArgument,
  ParseError,
  InfinityArithmetic,
  InvalidDomain,
  PointOutsideDomain,
  PointOnBoundary,
  DegenerateMap,
  MapDomainMismatch,
  InvalidRadius,
  UndefinedAtZero,
  SingularityInSupport,
  InvalidMeasure,
  CoincidentNodes,
  DuplicateNodes,
  ProbeTooCloseToSingularity,
  NotConverged,
  NotInUpperHalfPlane,
  TooFewAbsorbed,
  PoleHit,
  ProbeInsideDisc,
  UndersampledCloud,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InfinityArithmetic: return "InfinityArithmetic";
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::PointOnBoundary: return "PointOnBoundary";
    case ErrorKind::DegenerateMap: return "DegenerateMap";
    case ErrorKind::MapDomainMismatch: return "MapDomainMismatch";
    case ErrorKind::InvalidRadius: return "InvalidRadius";
    case ErrorKind::UndefinedAtZero: return "UndefinedAtZero";
    case ErrorKind::SingularityInSupport: return "SingularityInSupport";
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::CoincidentNodes: return "CoincidentNodes";
    case ErrorKind::DuplicateNodes: return "DuplicateNodes";
    case ErrorKind::ProbeTooCloseToSingularity: return "ProbeTooCloseToSingularity";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NotInUpperHalfPlane: return "NotInUpperHalfPlane";
    case ErrorKind::TooFewAbsorbed: return "TooFewAbsorbed";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::ProbeInsideDisc: return "ProbeInsideDisc";
    case ErrorKind::UndersampledCloud: return "UndersampledCloud";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` identifies the condition,
/// `what()` carries a human-readable message prefixed with the kind name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

/// True for failures caused by bad user input (as opposed to numerical
/// non-convergence). The CLI maps these to exit code 2.
constexpr bool is_input_error(ErrorKind kind) {
  return kind != ErrorKind::NotConverged && kind != ErrorKind::TooFewAbsorbed;
}

}  // namespace potkit
