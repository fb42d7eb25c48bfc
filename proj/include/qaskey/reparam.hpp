#ifndef QASKEY_REPARAM_HPP
#define QASKEY_REPARAM_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qaskey/lattice.hpp"

namespace qaskey {

/// Zero pattern of (a1, a2, b1, b2):
/// generic none, c1 a1, c2 b1, c3 a1 b1, c4 a2, c5 a2 b1, c6 b2, c7 a1 b2, c8 a2 b2.
enum class FamilyCase { Generic, C1, C2, C3, C4, C5, C6, C7, C8 };

std::string_view to_string(FamilyCase family_case);
std::optional<FamilyCase> parse_family_case(std::string_view name);

/// generic, c1, c2, c3: cubic numerator 1 - e1 u + e2 u^2 - e3 u^3
inline bool uses_cubic_numerator(FamilyCase c) {
  return c == FamilyCase::Generic || c == FamilyCase::C1 || c == FamilyCase::C2 ||
         c == FamilyCase::C3;
}

/// c4, c5: a2 = 0 with b2 != 0
inline bool is_a2_zero_case(FamilyCase c) { return c == FamilyCase::C4 || c == FamilyCase::C5; }

/// c6, c7: b2 = 0 with a2 != 0
inline bool is_b2_zero_case(FamilyCase c) { return c == FamilyCase::C6 || c == FamilyCase::C7; }

/// Cases whose coefficients carry the (q^k z2; q)_j factor, where the
/// rho recurrence in k and the Hadamard factorization hold.
inline bool has_z2_structure(FamilyCase c) { return uses_cubic_numerator(c) || is_a2_zero_case(c); }

/// Canonical form of a family. The y parameters are kept only through
/// symmetric functions.
///
/// Generic path: e1, e2, e3 are the elementary symmetric functions of
/// y1, y2, y3 with e3 = z1 z2 / q, and p is unused (0).
///
/// c4..c8: the numerator factor of rho is p - e1 u + e2 u^2, that is
/// e1 = p (y1 + y2) and e2 = p y1 y2. e2 is implied by the case
/// (z2 in c4/c5, z1 in c6/c7, 1 in c8) and e3 = 0.
template <RealScalar Real>
struct CanonicalParameters {
  FamilyCase family_case = FamilyCase::Generic;
  Real e1{0};
  Real e2{0};
  Real e3{0};
  Real z1{0};
  Real z2{0};
  Real p{0};
  Real b0{0};
  Real b1{0};
  Real b2{0};
};

template <RealScalar Real>
FamilyCase classify(const FamilyParameters<Real>& params);

template <RealScalar Real>
CanonicalParameters<Real> canonicalize(const FamilyParameters<Real>& params,
                                       const QContext<Real>& ctx);

/// Inverse of canonicalize; `a_scale` is the free a2 (or a1 when a2 = 0).
template <RealScalar Real>
FamilyParameters<Real> expand(const CanonicalParameters<Real>& canonical,
                              const QContext<Real>& ctx, const Real& a_scale = Real(1));

/// The per-index numerator factor of rho evaluated at u = q^i.
template <RealScalar Real>
Real numerator_factor(const CanonicalParameters<Real>& canonical, const Real& u) {
  if (uses_cubic_numerator(canonical.family_case)) {
    return 1 - u * (canonical.e1 - u * (canonical.e2 - u * canonical.e3));
  }
  return canonical.p - u * (canonical.e1 - u * canonical.e2);
}

template <RealScalar Real>
struct EquivalentVector {
  std::string label;
  FamilyParameters<Real> params;
};

template <RealScalar Real>
struct EquivalenceFamily {
  FamilyParameters<Real> original;
  std::vector<EquivalentVector<Real>> variants;
};

/// For P = (a1, a2, b0, 0, 0, s1, s2): P1 (b2 = 0) when a2 != 0 and
/// P2 (b1 = 0) when a1 != 0.
template <RealScalar Real>
EquivalenceFamily<Real> equivalent_vectors(const FamilyParameters<Real>& params,
                                           const QContext<Real>& ctx);

/// a1 <-> a2, b1 <-> b2, s1 <-> s2; pair with ctx.inverted().
template <RealScalar Real>
FamilyParameters<Real> invert_q(const FamilyParameters<Real>& params) {
  return {params.a2, params.a1, params.b0, params.b2, params.b1, params.s2, params.s1};
}

/// A family written with a base of modulus below one, inverting when needed.
/// The node sequence and the recurrence are unchanged by the inversion.
template <RealScalar Real>
struct ContractingForm {
  FamilyParameters<Real> params;
  QContext<Real> ctx;
  bool inverted = false;
};

template <RealScalar Real>
ContractingForm<Real> contracting_form(const FamilyParameters<Real>& params,
                                       const QContext<Real>& ctx) {
  if (ctx.is_contracting()) return {params, ctx, false};
  return {invert_q(params), ctx.inverted(), true};
}

}  // namespace qaskey

#endif  // QASKEY_REPARAM_HPP
