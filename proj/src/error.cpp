#include "normlab/error.hpp"

namespace normlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::WeightSumError: return "WeightSumError";
    case ErrorKind::NonContractingMap: return "NonContractingMap";
    case ErrorKind::HullNotInvariant: return "HullNotInvariant";
    case ErrorKind::DegenerateFixedPoints: return "DegenerateFixedPoints";
    case ErrorKind::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateHull: return "DegenerateHull";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ReduciblePolynomial: return "ReduciblePolynomial";
    case ErrorKind::NotAlgebraicInteger: return "NotAlgebraicInteger";
    case ErrorKind::IrreducibilityUndecided: return "IrreducibilityUndecided";
    case ErrorKind::BasePointOutsideHull: return "BasePointOutsideHull";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::InsufficientDigits: return "InsufficientDigits";
    case ErrorKind::BallStraddlesCut: return "BallStraddlesCut";
    case ErrorKind::StreamExhausted: return "StreamExhausted";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InsufficientBands: return "InsufficientBands";
    case ErrorKind::BlockLongerThanStream: return "BlockLongerThanStream";
    case ErrorKind::SupportTooWide: return "SupportTooWide";
    case ErrorKind::KOutOfRange: return "KOutOfRange";
    case ErrorKind::ConfigParseError: return "ConfigParseError";
  }
  return "UnknownError";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::WeightSumError:
    case ErrorKind::NonContractingMap:
    case ErrorKind::HullNotInvariant:
    case ErrorKind::DegenerateFixedPoints:
    case ErrorKind::SymbolOutOfRange:
    case ErrorKind::DegenerateHull:
    case ErrorKind::BasePointOutsideHull:
    case ErrorKind::InvalidInput:
    case ErrorKind::ReduciblePolynomial:
    case ErrorKind::NotAlgebraicInteger:
      return 2;
    case ErrorKind::NonConvergence:
    case ErrorKind::PrecisionExhausted:
    case ErrorKind::InsufficientDigits:
    case ErrorKind::BallStraddlesCut:
    case ErrorKind::StreamExhausted:
    case ErrorKind::BudgetExceeded:
    case ErrorKind::IrreducibilityUndecided:
      return 3;
    case ErrorKind::ConfigParseError:
    case ErrorKind::InsufficientBands:
    case ErrorKind::BlockLongerThanStream:
    case ErrorKind::SupportTooWide:
    case ErrorKind::KOutOfRange:
      return 4;
  }
  return 1;
}

}  // namespace normlab
