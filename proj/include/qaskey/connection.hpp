#ifndef QASKEY_CONNECTION_HPP
#define QASKEY_CONNECTION_HPP

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qaskey/lattice.hpp"
#include "qaskey/reparam.hpp"

namespace qaskey {

/// Lower-triangular C (u_n in the Newton basis) and its inverse Chat, both
/// size x size, plus the moments m_k = Chat[k][0].
template <RealScalar Real>
struct ConnectionMatrices {
  std::size_t size = 0;
  std::vector<std::vector<Real>> c;
  std::vector<std::vector<Real>> chat;
  std::vector<Real> moments;
};

enum class RecurrenceRoute { Direct, AbsForm, YzForm };

std::string_view to_string(RecurrenceRoute route);
std::optional<RecurrenceRoute> parse_route(std::string_view name);

/// u_{n+1}(t) = (t - beta_n) u_n(t) - alpha_n u_{n-1}(t).
/// alpha[n] for 1 <= n <= nmax (alpha[0] is unused and 0); beta[n] for
/// 0 <= n <= nmax.
template <RealScalar Real>
struct RecurrenceCoefficients {
  std::vector<Real> alpha;
  std::vector<Real> beta;
  RecurrenceRoute route = RecurrenceRoute::Direct;
};

template <RealScalar Real>
struct EigenResidual {
  std::size_t n = 0;
  Real residual{0};
};

/// A computed quantity with the magnitude of the terms that formed it.
template <RealScalar Real>
struct ScaledValue {
  Real value{0};
  Real scale{0};
};

template <RealScalar Real>
ConnectionMatrices<Real> connection_matrices(const SequenceSet<Real>& seq, std::size_t size,
                                             const QContext<Real>& ctx);

/// m_0 .. m_n
template <RealScalar Real>
std::vector<Real> moments(const SequenceSet<Real>& seq, std::size_t n, const QContext<Real>& ctx);

/// alpha_n from the g and h tables; needs max_index >= n + 1.
template <RealScalar Real>
ScaledValue<Real> direct_alpha(const SequenceSet<Real>& seq, std::size_t n);

template <RealScalar Real>
ScaledValue<Real> direct_beta(const SequenceSet<Real>& seq, std::size_t n);

/// Smallest numerator factor of alpha_n in abs form, each relative to the
/// sum of its own terms. Zero when alpha_n vanishes exactly.
template <RealScalar Real>
double alpha_vanishing_ratio(const FamilyParameters<Real>& params, std::size_t n, const Real& q);

template <RealScalar Real>
Real abs_form_p1(const FamilyParameters<Real>& params, const Real& x, const Real& q);

/// Expanded form of p2, valid for a2 = 0 as well.
template <RealScalar Real>
Real abs_form_p2(const FamilyParameters<Real>& params, const Real& x, const Real& q);

/// p2 through its defining relation -(a1^2 x^3 / (q^2 a2)) p1(q a2 / (a1 x));
/// needs a1, a2, x nonzero.
template <RealScalar Real>
Real abs_form_p2_from_p1(const FamilyParameters<Real>& params, const Real& x, const Real& q);

/// alpha_n and beta_n as rational functions of x (x = q^n on the lattice).
template <RealScalar Real>
Real abs_form_alpha(const FamilyParameters<Real>& params, const Real& x, const Real& q);

template <RealScalar Real>
Real abs_form_beta(const FamilyParameters<Real>& params, const Real& x, const Real& q);

template <RealScalar Real>
Real yz_form_alpha(const CanonicalParameters<Real>& canonical, const Real& x, const Real& q);

template <RealScalar Real>
Real yz_form_beta(const CanonicalParameters<Real>& canonical, const Real& x, const Real& q);

template <RealScalar Real>
RecurrenceCoefficients<Real> recurrence_coefficients(const FamilyParameters<Real>& params,
                                                     std::size_t nmax, RecurrenceRoute route,
                                                     const QContext<Real>& ctx);

/// c_{n,k} from the canonical parameters (cubic-numerator cases only).
template <RealScalar Real>
Real connection_entry_yz(const CanonicalParameters<Real>& canonical, std::size_t n,
                         std::size_t k, const QContext<Real>& ctx);

enum class PolynomialMethod { Newton, Recurrence };

template <RealScalar Real>
Real polynomial_values(const FamilyParameters<Real>& params, std::size_t n, const Real& t,
                       PolynomialMethod method, const QContext<Real>& ctx);

/// u_0(t) .. u_nmax(t) in one sweep.
template <RealScalar Real>
std::vector<Real> polynomial_sweep(const RecurrenceCoefficients<Real>& rec, std::size_t nmax,
                                   const Real& t);

/// max_k |(D c_n)_k - h_n c_{n,k}| over the largest sum of term magnitudes
/// in the row.
template <RealScalar Real>
EigenResidual<Real> eigen_residual(const FamilyParameters<Real>& params, std::size_t n,
                                   const QContext<Real>& ctx);

}  // namespace qaskey

#endif  // QASKEY_CONNECTION_HPP
