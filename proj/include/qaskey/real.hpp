#ifndef QASKEY_REAL_HPP
#define QASKEY_REAL_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/mpfr.hpp>

namespace qaskey {

/// Runtime-precision real used for extended-precision runs (expression
/// templates off so generic code can use `auto` and plain overloads).
using BigReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;

template <typename T>
concept RealScalar = std::is_same_v<T, double> || std::is_same_v<T, BigReal>;

/// Sets the working precision (decimal digits) of newly created BigReal
/// values for the lifetime of the guard, restoring the previous value after.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned digits)
      : previous_(BigReal::default_precision()) {
    BigReal::default_precision(digits);
  }
  ~ScopedPrecision() { BigReal::default_precision(previous_); }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned previous_;
};

template <RealScalar Real>
int working_digits() {
  if constexpr (std::is_same_v<Real, double>) {
    return std::numeric_limits<double>::digits10 + 1;
  } else {
    return static_cast<int>(BigReal::default_precision());
  }
}

/// Unit roundoff at the current working precision.
template <RealScalar Real>
Real machine_epsilon() {
  if constexpr (std::is_same_v<Real, double>) {
    return std::numeric_limits<double>::epsilon();
  } else {
    return boost::multiprecision::pow(BigReal(10), 1 - working_digits<BigReal>());
  }
}

/// Parses a decimal string; throws std::invalid_argument on malformed input.
template <RealScalar Real>
Real parse_real(std::string_view text);

/// Decimal rendering at full working precision (round-trips for double).
template <RealScalar Real>
std::string to_decimal(const Real& value);

template <RealScalar Real>
double to_double(const Real& value) {
  if constexpr (std::is_same_v<Real, double>) {
    return value;
  } else {
    return value.template convert_to<double>();
  }
}

template <RealScalar Real>
bool is_finite(const Real& value) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(value);
}

/// Integer power by repeated squaring; negative exponents invert.
template <RealScalar Real>
Real ipow(const Real& base, std::int64_t exponent) {
  Real result(1);
  Real factor = base;
  std::uint64_t e = exponent < 0 ? static_cast<std::uint64_t>(-exponent)
                                 : static_cast<std::uint64_t>(exponent);
  while (e != 0) {
    if (e & 1U) result *= factor;
    e >>= 1U;
    if (e != 0) factor *= factor;
  }
  if (exponent < 0) return Real(1) / result;
  return result;
}

/// Product accumulator that keeps a separate binary exponent in double mode,
/// so long products of very large and very small factors neither overflow
/// nor underflow before the final value is requested.
template <RealScalar Real>
class ScaledProduct {
 public:
  ScaledProduct() : mantissa_(1) {}
  explicit ScaledProduct(const Real& value) : mantissa_(value) { normalize(); }

  ScaledProduct& operator*=(const Real& factor) {
    mantissa_ *= factor;
    normalize();
    return *this;
  }
  ScaledProduct& operator/=(const Real& factor) {
    mantissa_ /= factor;
    normalize();
    return *this;
  }
  ScaledProduct& operator*=(const ScaledProduct& other) {
    mantissa_ *= other.mantissa_;
    exponent_ += other.exponent_;
    normalize();
    return *this;
  }
  ScaledProduct& operator/=(const ScaledProduct& other) {
    mantissa_ /= other.mantissa_;
    exponent_ -= other.exponent_;
    normalize();
    return *this;
  }

  /// Multiplies by base^power, power >= 0, without forming base^power.
  void multiply_power(const Real& base, std::uint64_t power) {
    ScaledProduct factor(base);
    while (power != 0) {
      if (power & 1U) *this *= factor;
      power >>= 1U;
      if (power != 0) factor *= factor;
    }
  }

  [[nodiscard]] bool is_zero() const { return mantissa_ == 0; }

  [[nodiscard]] Real value() const {
    if constexpr (std::is_same_v<Real, double>) {
      if (exponent_ > std::numeric_limits<int>::max()) return mantissa_ * HUGE_VAL;
      if (exponent_ < std::numeric_limits<int>::min()) return mantissa_ * 0.0;
      return std::ldexp(mantissa_, static_cast<int>(exponent_));
    } else {
      return mantissa_;
    }
  }

 private:
  void normalize() {
    if constexpr (std::is_same_v<Real, double>) {
      if (mantissa_ == 0.0 || !std::isfinite(mantissa_)) return;
      int e = 0;
      mantissa_ = std::frexp(mantissa_, &e);
      exponent_ += e;
    }
  }

  Real mantissa_;
  std::int64_t exponent_ = 0;
};

}  // namespace qaskey

#endif  // QASKEY_REAL_HPP
