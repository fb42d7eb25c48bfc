#include "qaskey/errors.hpp"

namespace qaskey {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateFamily: return "DegenerateFamily";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::CoincidentEigenvalues: return "CoincidentEigenvalues";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::InvalidZeroPattern: return "InvalidZeroPattern";
    case ErrorKind::InvalidCase: return "InvalidCase";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::InsufficientNodes: return "InsufficientNodes";
    case ErrorKind::DegenerateNorm: return "DegenerateNorm";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
  }
  return "Unknown";
}

}  // namespace qaskey
