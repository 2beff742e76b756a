#pragma once

#include <stdexcept>
#include <string>

namespace strataboot {

enum class ErrorCode {
  EmptySample,
  EmptyStratumArm,
  NonFiniteOutcome,
  SingletonStratum,
  DomainError,
  InsufficientArm,
  NotSharpEligible,
  NotPaired,
  TooFewPairs,
  TooLargeToEnumerate,
  DegenerateBootstrap,
  IdentityViolation,
  InvalidInput,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when too many bootstrap replicates have a zero studentizing scale.
class DegenerateBootstrapError : public Error {
 public:
  DegenerateBootstrapError(std::size_t n_degenerate, std::size_t replicates)
      : Error(ErrorCode::DegenerateBootstrap,
              std::to_string(n_degenerate) + " of " + std::to_string(replicates) +
                  " bootstrap replicates have zero estimated variance"),
        n_degenerate_(n_degenerate),
        replicates_(replicates) {}

  std::size_t n_degenerate() const noexcept { return n_degenerate_; }
  std::size_t replicates() const noexcept { return replicates_; }

 private:
  std::size_t n_degenerate_;
  std::size_t replicates_;
};

}  // namespace strataboot
