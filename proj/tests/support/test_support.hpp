#ifndef QASKEY_TEST_SUPPORT_HPP
#define QASKEY_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "qaskey/reparam.hpp"

namespace qaskey::test {

/// |a - b| / |b|, or |a| when b is exactly zero.
template <RealScalar Real>
double rel(const Real& a, const Real& b) {
  using std::abs;
  if (b == 0) return to_double(Real(abs(a)));
  return to_double(Real(abs(Real(a - b)) / abs(b)));
}

inline double rel_str(const BigReal& a, const char* b) { return rel(a, BigReal(b)); }

/// Uniform magnitude in [lo, hi] with a random sign.
inline double signed_uniform(std::mt19937_64& rng, double lo = 0.2, double hi = 2.0) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::bernoulli_distribution sign(0.5);
  const double v = mag(rng);
  return sign(rng) ? v : -v;
}

struct PresetCall {
  std::string name;
  std::vector<double> args;
};

/// One admissible argument set per preset.
inline std::vector<PresetCall> sample_presets() {
  return {
      {"askey_wilson", {0.3, 0.2, 0.1, 0.4}},
      {"continuous_big_q_hermite", {0.4}},
      {"discrete_q_hermite_1", {}},
      {"little_q_jacobi_v1", {0.3, 0.6}},
      {"little_q_jacobi_v2", {0.3, 0.6}},
      {"q_laguerre", {-0.5}},
      {"dual_q_hahn_v1", {0.3, 0.4, 10}},
      {"dual_q_hahn_v2", {0.3, 0.4, 10}},
      {"dual_q_hahn_v3", {0.3, 0.4, 10}},
  };
}

template <RealScalar Real>
std::vector<Real> to_real(const std::vector<double>& v) {
  return std::vector<Real>(v.begin(), v.end());
}

/// Random canonical parameters whose zero pattern matches `c`, with the
/// dependent fields filled the way canonicalize fills them.
inline CanonicalParameters<double> random_canonical(FamilyCase c, double q, std::mt19937_64& rng) {
  CanonicalParameters<double> out;
  out.family_case = c;
  out.b0 = signed_uniform(rng);
  out.e1 = signed_uniform(rng);
  if (uses_cubic_numerator(c)) {
    out.z1 = (c == FamilyCase::C1 || c == FamilyCase::C3) ? 0.0 : signed_uniform(rng);
    out.z2 = (c == FamilyCase::C2 || c == FamilyCase::C3) ? 0.0 : signed_uniform(rng);
    out.e2 = signed_uniform(rng);
    out.e3 = out.z1 * out.z2 / q;
    out.b2 = signed_uniform(rng);
    out.b1 = out.z2 * out.b2 / q;
  } else if (is_a2_zero_case(c)) {
    out.z2 = c == FamilyCase::C5 ? 0.0 : signed_uniform(rng);
    out.p = signed_uniform(rng);
    out.e2 = out.z2;
    out.b2 = signed_uniform(rng);
    out.b1 = out.z2 * out.b2 / q;
  } else if (is_b2_zero_case(c)) {
    out.z1 = c == FamilyCase::C7 ? 0.0 : signed_uniform(rng);
    out.p = signed_uniform(rng);
    out.e2 = out.z1;
    out.b1 = signed_uniform(rng);
  } else {
    out.p = signed_uniform(rng);
    out.e2 = 1.0;
    out.b1 = signed_uniform(rng);
  }
  return out;
}

inline constexpr FamilyCase kAllCases[] = {FamilyCase::Generic, FamilyCase::C1, FamilyCase::C2,
                                           FamilyCase::C3,      FamilyCase::C4, FamilyCase::C5,
                                           FamilyCase::C6,      FamilyCase::C7, FamilyCase::C8};

/// Largest relative (absolute where the reference is zero) field difference.
inline double canonical_distance(const CanonicalParameters<double>& a,
                                 const CanonicalParameters<double>& b) {
  const double pairs[][2] = {{a.e1, b.e1}, {a.e2, b.e2}, {a.e3, b.e3}, {a.z1, b.z1},
                             {a.z2, b.z2}, {a.p, b.p},   {a.b0, b.b0}, {a.b1, b.b1},
                             {a.b2, b.b2}};
  double worst = 0;
  for (const auto& [x, y] : pairs) {
    const double scale = std::max(std::abs(y), 1.0);
    worst = std::max(worst, std::abs(x - y) / scale);
  }
  return worst;
}

}  // namespace qaskey::test

#endif  // QASKEY_TEST_SUPPORT_HPP
