#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ltforge {

enum class ErrorKind {
  InvalidSpec,
  MixedSpec,
  NotAUnit,
  MixedRing,
  NonzeroConstantTerm,
  NotInvertible,
  IntegralityFailure,
  PrecisionExhausted,
  WrongCoordinate,
  CommutationFails,
  NotSeparable,
  TorsionW,
  TorsionGamma,
  BaseFieldIsQp,
  BadGamma,
  ValuationZero,
  BudgetExceeded,
  WrongValuation,
  NotEquivariant,
  VerificationFailed,
  NoSeparablePower,
  ParseError,
};

std::string_view error_name(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so
/// the CLI and the Python bindings can report it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ltforge
