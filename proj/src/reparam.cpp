#include "qaskey/reparam.hpp"

#include <array>
#include <utility>

namespace qaskey {

namespace {

constexpr std::array<std::pair<FamilyCase, std::string_view>, 9> kCaseNames{{
    {FamilyCase::Generic, "generic"},
    {FamilyCase::C1, "c1"},
    {FamilyCase::C2, "c2"},
    {FamilyCase::C3, "c3"},
    {FamilyCase::C4, "c4"},
    {FamilyCase::C5, "c5"},
    {FamilyCase::C6, "c6"},
    {FamilyCase::C7, "c7"},
    {FamilyCase::C8, "c8"},
}};

[[noreturn]] void invalid_case(std::string_view family_case, const char* why) {
  throw Error(ErrorKind::InvalidCase, std::string(family_case) + ": " + why);
}

}  // namespace

std::string_view to_string(FamilyCase family_case) {
  for (const auto& [value, name] : kCaseNames) {
    if (value == family_case) return name;
  }
  return "unknown";
}

std::optional<FamilyCase> parse_family_case(std::string_view name) {
  for (const auto& [value, text] : kCaseNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

template <RealScalar Real>
FamilyCase classify(const FamilyParameters<Real>& p) {
  if (p.a1 == 0 && p.a2 == 0) {
    throw Error(ErrorKind::InvalidZeroPattern, "a1 and a2 are both zero");
  }
  if (p.b1 == 0 && p.b2 == 0) {
    throw Error(ErrorKind::InvalidZeroPattern, "b1 and b2 are both zero");
  }
  const bool a1 = p.a1 == 0;
  const bool a2 = p.a2 == 0;
  const bool b1 = p.b1 == 0;
  const bool b2 = p.b2 == 0;
  if (a2 && b2) return FamilyCase::C8;
  if (a2) return b1 ? FamilyCase::C5 : FamilyCase::C4;
  if (b2) return a1 ? FamilyCase::C7 : FamilyCase::C6;
  if (a1 && b1) return FamilyCase::C3;
  if (a1) return FamilyCase::C1;
  if (b1) return FamilyCase::C2;
  return FamilyCase::Generic;
}

template <RealScalar Real>
CanonicalParameters<Real> canonicalize(const FamilyParameters<Real>& params,
                                       const QContext<Real>& ctx) {
  const Real& q = ctx.q();
  const auto& [a1, a2, b0, b1, b2, s1, s2] = params;
  CanonicalParameters<Real> c;
  c.family_case = classify(params);
  c.b0 = b0;
  c.b1 = b1;
  c.b2 = b2;
  if (uses_cubic_numerator(c.family_case)) {
    c.z1 = q * a1 / a2;
    c.z2 = q * b1 / b2;
    c.e1 = c.z1 - (s2 / a2 + b0) / b2;
    c.e2 = c.z2 / q - (q * s1 / a2 + b0 * c.z1) / b2;
    c.e3 = c.z1 * c.z2 / q;
  } else if (is_a2_zero_case(c.family_case)) {
    c.z2 = q * b1 / b2;
    c.p = q - s2 / (a1 * b2);
    c.e1 = -q * (s1 + a1 * b0) / (a1 * b2);
    c.e2 = c.z2;
  } else if (is_b2_zero_case(c.family_case)) {
    c.z1 = q * a1 / a2;
    c.p = -(s2 / a2 + b0) / b1;
    c.e1 = (-q * s1 / a2 - b0 * c.z1 + b1) / b1;
    c.e2 = c.z1;
  } else {
    c.p = -s2 / (q * a1 * b1);
    c.e1 = -(s1 / a1 + b0) / b1;
    c.e2 = Real(1);
  }
  return c;
}

template <RealScalar Real>
FamilyParameters<Real> expand(const CanonicalParameters<Real>& c, const QContext<Real>& ctx,
                              const Real& a_scale) {
  const Real& q = ctx.q();
  const Real& A = a_scale;
  const std::string_view name = to_string(c.family_case);
  if (A == 0) throw Error(ErrorKind::InvalidArgument, "a_scale must be nonzero");

  const bool z1_zero = c.z1 == 0;
  const bool z2_zero = c.z2 == 0;
  FamilyParameters<Real> out;
  out.b0 = c.b0;
  switch (c.family_case) {
    case FamilyCase::Generic:
    case FamilyCase::C1:
    case FamilyCase::C2:
    case FamilyCase::C3: {
      const bool want_z1_zero = c.family_case == FamilyCase::C1 || c.family_case == FamilyCase::C3;
      const bool want_z2_zero = c.family_case == FamilyCase::C2 || c.family_case == FamilyCase::C3;
      if (z1_zero != want_z1_zero) invalid_case(name, "z1 inconsistent with the case tag");
      if (z2_zero != want_z2_zero) invalid_case(name, "z2 inconsistent with the case tag");
      if (c.b2 == 0) invalid_case(name, "b2 must be nonzero");
      out.a2 = A;
      out.a1 = c.z1 * A / q;
      out.b2 = c.b2;
      out.b1 = c.z2 * c.b2 / q;
      out.s1 = (-A / q) * ((c.e2 - c.z2 / q) * c.b2 + c.b0 * c.z1);
      out.s2 = -A * ((c.e1 - c.z1) * c.b2 + c.b0);
      break;
    }
    case FamilyCase::C4:
    case FamilyCase::C5: {
      if (z2_zero != (c.family_case == FamilyCase::C5)) {
        invalid_case(name, "z2 inconsistent with the case tag");
      }
      if (c.b2 == 0) invalid_case(name, "b2 must be nonzero");
      out.a1 = A;
      out.b2 = c.b2;
      out.b1 = c.z2 * c.b2 / q;
      out.s1 = -(A / q) * c.e1 * c.b2 - A * c.b0;
      out.s2 = A * c.b2 * (q - c.p);
      break;
    }
    case FamilyCase::C6:
    case FamilyCase::C7: {
      if (z1_zero != (c.family_case == FamilyCase::C7)) {
        invalid_case(name, "z1 inconsistent with the case tag");
      }
      if (c.b1 == 0) invalid_case(name, "b1 must be nonzero");
      out.a2 = A;
      out.a1 = c.z1 * A / q;
      out.b1 = c.b1;
      out.s1 = -(A / q) * (c.b1 * c.e1 + c.b0 * c.z1 - c.b1);
      out.s2 = -A * (c.b0 + c.p * c.b1);
      break;
    }
    case FamilyCase::C8: {
      if (c.b1 == 0) invalid_case(name, "b1 must be nonzero");
      out.a1 = A;
      out.b1 = c.b1;
      out.s1 = -A * (c.b1 * c.e1 + c.b0);
      out.s2 = -q * c.p * A * c.b1;
      break;
    }
  }
  return out;
}

template <RealScalar Real>
EquivalenceFamily<Real> equivalent_vectors(const FamilyParameters<Real>& params,
                                           const QContext<Real>& ctx) {
  if (params.b1 != 0 || params.b2 != 0) {
    throw Error(ErrorKind::NotApplicable, "equivalent vectors need b1 = b2 = 0");
  }
  if (params.a1 == 0 && params.a2 == 0) {
    throw Error(ErrorKind::DegenerateFamily, "a1 and a2 are both zero");
  }
  const Real& q = ctx.q();
  const auto& [a1, a2, b0, b1, b2, s1, s2] = params;
  EquivalenceFamily<Real> family{params, {}};
  if (a2 != 0) {
    FamilyParameters<Real> p1 = params;
    p1.b1 = -(b0 * a2 + s2) / a2;
    p1.s1 = (q * s1 - b0 * a2 - s2) / q;
    p1.s2 = -b0 * a2;
    family.variants.push_back({"P1", p1});
  }
  if (a1 != 0) {
    FamilyParameters<Real> p2 = params;
    p2.b2 = -(b0 * a1 + s1) / a1;
    p2.s1 = -b0 * a1;
    p2.s2 = s2 - q * a1 * b0 - q * s1;
    family.variants.push_back({"P2", p2});
  }
  return family;
}

#define QASKEY_INSTANTIATE(Real)                                                               \
  template FamilyCase classify(const FamilyParameters<Real>&);                                 \
  template CanonicalParameters<Real> canonicalize(const FamilyParameters<Real>&,               \
                                                  const QContext<Real>&);                      \
  template FamilyParameters<Real> expand(const CanonicalParameters<Real>&,                     \
                                         const QContext<Real>&, const Real&);                  \
  template EquivalenceFamily<Real> equivalent_vectors(const FamilyParameters<Real>&,           \
                                                      const QContext<Real>&);

QASKEY_INSTANTIATE(double)
QASKEY_INSTANTIATE(BigReal)

}  // namespace qaskey
