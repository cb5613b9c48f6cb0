#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confmod {

enum class ErrorKind {
  InvalidInput,
  IntervalViolation,
  OrderingViolation,
  EndpointMismatch,
  DegenerateStrip,
  NonpositiveGap,
  NonpositiveOrUnorderedRadii,
  OutOfRange,
  PoleEvaluation,
  SolverDivergence,
  ComponentsTouch,
  DegenerateArc,
  DisconnectedGraph,
  InsufficientSpan,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace confmod
