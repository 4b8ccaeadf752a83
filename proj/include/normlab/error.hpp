#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace normlab {

enum class ErrorKind {
  // ifs-core
  WeightSumError,
  NonContractingMap,
  HullNotInvariant,
  DegenerateFixedPoints,
  SymbolOutOfRange,
  NonConvergence,
  DegenerateHull,
  // algebra
  InvalidInput,
  ReduciblePolynomial,
  NotAlgebraicInteger,
  IrreducibilityUndecided,
  // sampling / orbits
  BasePointOutsideHull,
  PrecisionExhausted,
  InsufficientDigits,
  BallStraddlesCut,
  StreamExhausted,
  // fourier
  BudgetExceeded,
  InsufficientBands,
  // statistics
  BlockLongerThanStream,
  SupportTooWide,
  KOutOfRange,
  // cli
  ConfigParseError,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code associated with an error kind: 2 validation,
/// 3 precision/budget, 4 configuration, 1 anything else.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace normlab
