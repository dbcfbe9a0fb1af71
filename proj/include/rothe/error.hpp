#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rothe {

enum class ErrorCode {
  // graph construction
  NonPositiveWeight,
  NonPositiveMeasure,
  SelfLoop,
  DuplicateEdge,
  DuplicateVertex,
  AsymmetricWeight,
  UnknownVertex,
  DisconnectedGraph,
  IsolatedVertex,
  // domains and exhaustion
  EmptyScope,
  EmptyOmega,
  EmptyInterior,
  SeedOutsideDomain,
  UnmaterializedNeighbor,
  // calculus
  InfiniteSupport,
  InvalidQ,
  NotDirichletAdmissible,
  DomainMismatch,
  NonFiniteValue,
  // solvers
  InvalidArgument,
  NonConvergence,
  SolverBreakdown,
  StiffnessFailure,
  TimeOutOfRange,
  InsufficientSamples,
  GraphMismatch,
  // front-end
  ParseError,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NonPositiveMeasure: return "NonPositiveMeasure";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::DuplicateVertex: return "DuplicateVertex";
    case ErrorCode::AsymmetricWeight: return "AsymmetricWeight";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::EmptyScope: return "EmptyScope";
    case ErrorCode::EmptyOmega: return "EmptyOmega";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::SeedOutsideDomain: return "SeedOutsideDomain";
    case ErrorCode::UnmaterializedNeighbor: return "UnmaterializedNeighbor";
    case ErrorCode::InfiniteSupport: return "InfiniteSupport";
    case ErrorCode::InvalidQ: return "InvalidQ";
    case ErrorCode::NotDirichletAdmissible: return "NotDirichletAdmissible";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SolverBreakdown: return "SolverBreakdown";
    case ErrorCode::StiffnessFailure: return "StiffnessFailure";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::GraphMismatch: return "GraphMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rothe
