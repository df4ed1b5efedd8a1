#include "mcqmc/error.hpp"

namespace mcqmc {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Exhausted: return "Exhausted";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InvalidBound: return "InvalidBound";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::Numerical: return "Numerical";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace mcqmc
