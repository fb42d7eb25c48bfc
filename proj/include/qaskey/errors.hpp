#ifndef QASKEY_ERRORS_HPP
#define QASKEY_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace qaskey {

enum class ErrorKind {
  InvalidArgument,
  NoConvergence,
  DegenerateFamily,
  IndexOutOfRange,
  CoincidentEigenvalues,
  ZeroDenominator,
  InvalidZeroPattern,
  InvalidCase,
  NotApplicable,
  InsufficientNodes,
  DegenerateNorm,
  ConstraintViolation,
  UnknownPreset,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` says which contract failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qaskey

#endif  // QASKEY_ERRORS_HPP
