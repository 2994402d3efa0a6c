#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smirnov {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  NonConvergence,
  CircleTooClose,
  NotRelativelyPrime,
  DenominatorVanishesInDisk,
  BoundaryNotReal,
  InconsistentValence,
  QuadratureUnstable,
  InvalidTree,
  ResolutionTooCoarse,
  RootNearInterface,
  TraceStalled,
  NonMonotone,
  InterfaceNotUnique,
  ExtractionMismatch,
  NotInCatalog,
  InfeasibleTarget,
  BudgetExhausted,
  CapExceeded,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::CircleTooClose: return "CircleTooClose";
    case ErrorCode::NotRelativelyPrime: return "NotRelativelyPrime";
    case ErrorCode::DenominatorVanishesInDisk: return "DenominatorVanishesInDisk";
    case ErrorCode::BoundaryNotReal: return "BoundaryNotReal";
    case ErrorCode::InconsistentValence: return "InconsistentValence";
    case ErrorCode::QuadratureUnstable: return "QuadratureUnstable";
    case ErrorCode::InvalidTree: return "InvalidTree";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::RootNearInterface: return "RootNearInterface";
    case ErrorCode::TraceStalled: return "TraceStalled";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::InterfaceNotUnique: return "InterfaceNotUnique";
    case ErrorCode::ExtractionMismatch: return "ExtractionMismatch";
    case ErrorCode::NotInCatalog: return "NotInCatalog";
    case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::CapExceeded: return "CapExceeded";
  }
  return "Unknown";
}

// Every failure raised by the library carries a code and the module that
// produced it, so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + " [" + module + "]: " + detail),
        code_(code),
        module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace smirnov
