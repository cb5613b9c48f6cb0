#include "confmod/error.hpp"

namespace confmod {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::IntervalViolation: return "interval-violation";
    case ErrorKind::OrderingViolation: return "ordering-violation";
    case ErrorKind::EndpointMismatch: return "endpoint-mismatch";
    case ErrorKind::DegenerateStrip: return "degenerate-strip";
    case ErrorKind::NonpositiveGap: return "nonpositive-gap";
    case ErrorKind::NonpositiveOrUnorderedRadii: return "nonpositive-or-unordered-radii";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::PoleEvaluation: return "pole-evaluation";
    case ErrorKind::SolverDivergence: return "solver-divergence";
    case ErrorKind::ComponentsTouch: return "components-touch";
    case ErrorKind::DegenerateArc: return "degenerate-arc";
    case ErrorKind::DisconnectedGraph: return "disconnected-graph";
    case ErrorKind::InsufficientSpan: return "insufficient-span";
    case ErrorKind::Config: return "config-error";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

}  // namespace confmod
