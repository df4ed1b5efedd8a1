#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcqmc {

enum class ErrorKind {
  Exhausted,
  DimensionMismatch,
  DomainError,
  InvalidState,
  InvalidBound,
  BudgetExceeded,
  TooShort,
  Numerical,
  Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library-wide exception. The kind drives CLI exit codes; the message is
/// for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace mcqmc
