#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpanet {

enum class ErrorCode {
  OverlappingDomains,
  LengthMismatch,
  DomainMismatch,
  HorizonExceeded,
  AlphabetViolation,
  OverlapError,
  UnknownState,
  NotReactive,
  ExplosionGuard,
  Configuration,
  IncompatibleSignatures,
  EmptyComposition,
  NotAnOutput,
  CausalityViolation,
  NotContractive,
  NoConvergence,
  PrecondViolated,
  FixpointInconsistent,
  SyntaxError,
  NameError,
  TypeError,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this one type; the code tells
// callers (and the CLI exit status) which contract was broken.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tpanet
