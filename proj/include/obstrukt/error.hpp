#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace obstrukt {

enum class ErrorCode {
  InvalidDimension,
  ModulusMismatch,
  NotPrime,
  ParseError,
  IllFormedDifferential,
  DegreeOverflow,
  NotAMorphism,
  ProductsNonzero,
  OddPrimeRequired,
  TooLarge,
  CapExceeded,
  NotSurjective,
  NotQuasiIso,
  NotACocycle,
  NotInIdeal,
  NotAStaircase,
  NotAChainMap,
  NotMultiplicative,
  UnknownEntry,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code so the
/// CLI can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace obstrukt
