#ifndef QASKEY_QNUM_HPP
#define QASKEY_QNUM_HPP

#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>

#include "qaskey/errors.hpp"
#include "qaskey/real.hpp"

namespace qaskey {

template <RealScalar Real>
Real default_tolerance() {
  if constexpr (std::is_same_v<Real, double>) {
    return 1e-20;
  } else {
    return Real("1e-30");
  }
}

/// Base q and the numerical knobs shared by every series evaluation.
///
/// The difference equation s_{k+3} = z (s_{k+2} - s_{k+1}) + s_k has the
/// characteristic roots 1, q, 1/q; they must be distinct, which excludes
/// q = 0, 1, -1.
template <RealScalar Real>
class QContext {
 public:
  static constexpr std::size_t kDefaultMaxTerms = 20000;

  explicit QContext(Real q, Real tol = default_tolerance<Real>(),
                    std::size_t max_terms = kDefaultMaxTerms)
      : q_(std::move(q)), tol_(std::move(tol)), max_terms_(max_terms),
        precision_(working_digits<Real>()) {
    if (q_ == 0 || q_ == 1 || q_ == -1) {
      throw Error(ErrorKind::InvalidArgument, "q must differ from 0, 1 and -1");
    }
    if (!(tol_ > 0) || !(tol_ < 1)) {
      throw Error(ErrorKind::InvalidArgument, "tol must lie in (0, 1)");
    }
    if (max_terms_ < 16) {
      throw Error(ErrorKind::InvalidArgument, "max_terms must be at least 16");
    }
    z_ = 1 + q_ + 1 / q_;
  }

  [[nodiscard]] const Real& q() const { return q_; }
  [[nodiscard]] const Real& z() const { return z_; }
  [[nodiscard]] const Real& tol() const { return tol_; }
  [[nodiscard]] std::size_t max_terms() const { return max_terms_; }
  [[nodiscard]] int precision() const { return precision_; }

  /// |q| < 1
  [[nodiscard]] bool is_contracting() const {
    using std::abs;
    return abs(q_) < 1;
  }

  /// Same knobs with base 1/q.
  [[nodiscard]] QContext inverted() const { return QContext(1 / q_, tol_, max_terms_); }

 private:
  Real q_;
  Real tol_;
  std::size_t max_terms_;
  int precision_;
  Real z_;
};

template <RealScalar Real>
struct SeriesResult {
  Real value{0};
  std::size_t terms_used = 0;
  Real tail_bound{0};
  /// A term was exactly zero and every later term vanishes with it.
  bool terminated = false;
};

/// Neumaier compensated accumulator.
template <RealScalar Real>
class CompensatedSum {
 public:
  void add(const Real& term) {
    using std::abs;
    Real updated = sum_ + term;
    if (abs(sum_) >= abs(term)) {
      compensation_ += (sum_ - updated) + term;
    } else {
      compensation_ += (term - updated) + sum_;
    }
    sum_ = updated;
  }
  [[nodiscard]] Real value() const { return sum_ + compensation_; }

 private:
  Real sum_{0};
  Real compensation_{0};
};

/// One coefficient of a series; `last` declares that all later terms vanish.
template <RealScalar Real>
struct SeriesTerm {
  Real value;
  bool last = false;
};

/// (t; q)_k = (1 - t)(1 - q t) ... (1 - q^{k-1} t); exactly 1 for k = 0.
template <RealScalar Real>
Real q_pochhammer(const Real& t, std::size_t k, const QContext<Real>& ctx) {
  Real result(1);
  Real shifted = t;
  for (std::size_t i = 0; i < k; ++i) {
    result *= 1 - shifted;
    shifted *= ctx.q();
  }
  return result;
}

/// Sums c_start + c_{start+1} + ... until the geometric tail criterion holds:
/// three consecutive terms each satisfy |c_j| <= tol |S|, have an empirical
/// ratio |c_j / c_{j-1}| < 0.95, and the geometric majorant of the remainder
/// |c_j| r / (1 - r) is itself below tol |S|.
///
/// `coeff(j)` returns either a Real or a SeriesTerm<Real>. Accumulation is
/// compensated.
template <RealScalar Real, typename Generator>
SeriesResult<Real> sum_tail_bounded(Generator&& coeff, std::size_t start,
                                    const QContext<Real>& ctx) {
  using std::abs;
  constexpr double kMaxRatio = 0.95;

  SeriesResult<Real> result;
  CompensatedSum<Real> sum;
  Real previous_abs(0);
  bool have_previous = false;
  int quiet_run = 0;

  for (std::size_t j = start;; ++j) {
    if (result.terms_used >= ctx.max_terms()) {
      throw Error(ErrorKind::NoConvergence,
                  "series did not meet the tail criterion within " +
                      std::to_string(ctx.max_terms()) + " terms");
    }
    SeriesTerm<Real> term;
    if constexpr (std::is_same_v<std::decay_t<decltype(coeff(j))>, SeriesTerm<Real>>) {
      term = coeff(j);
    } else {
      term.value = coeff(j);
    }
    if (!is_finite(term.value)) {
      throw Error(ErrorKind::NoConvergence, "non-finite series term at index " + std::to_string(j));
    }
    ++result.terms_used;

    sum.add(term.value);
    if (term.last) {
      result.value = sum.value();
      result.terminated = true;
      return result;
    }

    const Real magnitude = abs(term.value);
    const Real current = abs(sum.value());
    bool quiet = false;
    if (have_previous && previous_abs != 0) {
      const Real ratio = magnitude / previous_abs;
      if (ratio < kMaxRatio && magnitude <= ctx.tol() * current) {
        const Real tail = magnitude * ratio / (1 - ratio);
        if (tail <= ctx.tol() * current) {
          quiet = true;
          if (++quiet_run >= 3) {
            result.value = sum.value();
            result.tail_bound = tail;
            return result;
          }
        }
      }
    }
    if (!quiet) quiet_run = 0;
    previous_abs = magnitude;
    have_previous = true;
  }
}

}  // namespace qaskey

#endif  // QASKEY_QNUM_HPP
