#include "qaskey/connection.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

namespace qaskey {

namespace {

constexpr std::array<std::pair<RecurrenceRoute, std::string_view>, 3> kRouteNames{{
    {RecurrenceRoute::Direct, "direct"},
    {RecurrenceRoute::AbsForm, "abs-form"},
    {RecurrenceRoute::YzForm, "yz-form"},
}};

template <RealScalar Real>
Real absolute(const Real& v) {
  using std::abs;
  return abs(v);
}

/// Throws ZeroDenominator when `den` is zero relative to the size of the
/// terms it was formed from.
template <RealScalar Real>
const Real& nonresonant(const Real& den, const Real& scale, const char* what) {
  if (absolute(den) <= 1000 * machine_epsilon<Real>() * scale) {
    throw Error(ErrorKind::ZeroDenominator, std::string(what) + " vanishes");
  }
  return den;
}

/// a x^2 - q^m b with its term scale
template <RealScalar Real>
Real resonance_factor(const Real& a, const Real& x2, const Real& qm, const Real& b,
                      const char* what) {
  const Real left = a * x2;
  const Real right = qm * b;
  return nonresonant(Real(left - right), Real(absolute(left) + absolute(right)), what);
}

template <RealScalar Real>
Real h_gap(const SequenceSet<Real>& seq, std::size_t i, std::size_t j) {
  if (nearly_equal(seq.h(i), seq.h(j))) {
    throw Error(ErrorKind::CoincidentEigenvalues,
                "h_" + std::to_string(i) + " = h_" + std::to_string(j));
  }
  return seq.h(i) - seq.h(j);
}

}  // namespace

std::string_view to_string(RecurrenceRoute route) {
  for (const auto& [value, name] : kRouteNames) {
    if (value == route) return name;
  }
  return "unknown";
}

std::optional<RecurrenceRoute> parse_route(std::string_view name) {
  for (const auto& [value, text] : kRouteNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

template <RealScalar Real>
ConnectionMatrices<Real> connection_matrices(const SequenceSet<Real>& seq, std::size_t size,
                                             const QContext<Real>& /*ctx*/) {
  ConnectionMatrices<Real> out;
  out.size = size;
  if (size == 0) return out;
  if (size - 1 > seq.max_index()) {
    throw Error(ErrorKind::IndexOutOfRange, "connection matrices need max_index >= size - 1");
  }
  out.c.assign(size, {});
  out.chat.assign(size, {});
  for (std::size_t n = 0; n < size; ++n) {
    out.c[n].assign(n + 1, Real(0));
    out.chat[n].assign(n + 1, Real(0));
    // c_{n,k} = c_{n,k+1} g_{k+1} / (h_n - h_k), right to left
    out.c[n][n] = Real(1);
    for (std::size_t k = n; k-- > 0;) {
      out.c[n][k] = out.c[n][k + 1] * seq.g(k + 1) / h_gap(seq, n, k);
    }
    // chat_{n,k} = chat_{n-1,k} g_n / (h_k - h_n), column-wise from the row above
    out.chat[n][n] = Real(1);
    for (std::size_t k = 0; k < n; ++k) {
      out.chat[n][k] = out.chat[n - 1][k] * seq.g(n) / h_gap(seq, k, n);
    }
  }
  out.moments.reserve(size);
  for (std::size_t k = 0; k < size; ++k) out.moments.push_back(out.chat[k][0]);
  return out;
}

template <RealScalar Real>
std::vector<Real> moments(const SequenceSet<Real>& seq, std::size_t n,
                          const QContext<Real>& /*ctx*/) {
  if (n > seq.max_index()) {
    throw Error(ErrorKind::IndexOutOfRange, "moments need max_index >= n");
  }
  std::vector<Real> m;
  m.reserve(n + 1);
  m.push_back(Real(1));
  for (std::size_t i = 1; i <= n; ++i) m.push_back(m.back() * seq.g(i) / h_gap(seq, 0, i));
  return m;
}

template <RealScalar Real>
ScaledValue<Real> direct_alpha(const SequenceSet<Real>& seq, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::IndexOutOfRange, "alpha_n starts at n = 1");
  const Real lead = seq.g(n) / h_gap(seq, n - 1, n);
  const Real t1 = n >= 2 ? Real(seq.g(n - 1) / h_gap(seq, n - 2, n)) : Real(0);
  const Real t3 = seq.g(n + 1) / h_gap(seq, n - 1, n + 1);
  const Real& xn = seq.x(n);
  const Real& xm = seq.x(n - 1);
  ScaledValue<Real> out;
  out.value = lead * (t1 - lead + t3 + xn - xm);
  out.scale = absolute(lead) * (absolute(t1) + absolute(lead) + absolute(t3) + absolute(xn) +
                                absolute(xm));
  return out;
}

template <RealScalar Real>
ScaledValue<Real> direct_beta(const SequenceSet<Real>& seq, std::size_t n) {
  const Real t2 = seq.g(n + 1) / h_gap(seq, n, n + 1);
  const Real t3 = n >= 1 ? Real(seq.g(n) / h_gap(seq, n - 1, n)) : Real(0);
  ScaledValue<Real> out;
  out.value = seq.x(n) + t2 - t3;
  out.scale = absolute(seq.x(n)) + absolute(t2) + absolute(t3);
  return out;
}

template <RealScalar Real>
Real abs_form_p1(const FamilyParameters<Real>& p, const Real& x, const Real& q) {
  return (p.a1 * x - p.a2) * (p.b1 * x * x + p.b0 * q * x + p.b2 * q * q) +
         q * x * (p.s1 * x - p.s2);
}

template <RealScalar Real>
Real abs_form_p2(const FamilyParameters<Real>& p, const Real& x, const Real& q) {
  return (x - q) * (p.b2 * p.a1 * p.a1 * x * x + p.b0 * p.a1 * p.a2 * x + p.b1 * p.a2 * p.a2) -
         q * p.a2 * p.s1 * x + p.a1 * p.s2 * x * x;
}

template <RealScalar Real>
Real abs_form_p2_from_p1(const FamilyParameters<Real>& p, const Real& x, const Real& q) {
  if (p.a1 == 0 || p.a2 == 0 || x == 0) {
    throw Error(ErrorKind::ZeroDenominator, "defining relation of p2 needs a1, a2, x nonzero");
  }
  return -(p.a1 * p.a1 * x * x * x / (q * q * p.a2)) * abs_form_p1(p, Real(q * p.a2 / (p.a1 * x)), q);
}

template <RealScalar Real>
Real abs_form_alpha(const FamilyParameters<Real>& p, const Real& x, const Real& q) {
  const Real x2 = x * x;
  const Real d0 = resonance_factor(p.a1, x2, Real(1), p.a2, "a1 x^2 - a2");
  const Real d1 = resonance_factor(p.a1, x2, q, p.a2, "a1 x^2 - q a2");
  const Real d2 = resonance_factor(p.a1, x2, Real(q * q), p.a2, "a1 x^2 - q^2 a2");
  return (x - 1) * (p.a1 * x - q * p.a2) * abs_form_p1(p, x, q) * abs_form_p2(p, x, q) /
         (d0 * d1 * d1 * d2);
}

template <RealScalar Real>
double alpha_vanishing_ratio(const FamilyParameters<Real>& p, std::size_t n, const Real& q) {
  const Real x = ipow(q, static_cast<std::int64_t>(n));
  auto ratio = [](const Real& value, const Real& scale) {
    return scale == 0 ? 0.0 : to_double(Real(absolute(value) / scale));
  };
  const Real ax = absolute(x);
  const Real aq = absolute(q);
  const Real h_scale = absolute(p.a1) * ax + absolute(p.a2);
  const Real b_scale =
      absolute(p.b1) * ax * ax + absolute(p.b0) * aq * ax + absolute(p.b2) * aq * aq;
  const Real p1_scale = h_scale * b_scale + aq * ax * (absolute(p.s1) * ax + absolute(p.s2));
  const Real p2_scale =
      (ax + aq) * (absolute(p.b2 * p.a1 * p.a1) * ax * ax + absolute(p.b0 * p.a1 * p.a2) * ax +
                   absolute(p.b1 * p.a2 * p.a2)) +
      aq * absolute(p.a2 * p.s1) * ax + absolute(p.a1 * p.s2) * ax * ax;
  return std::min({ratio(Real(x - 1), Real(ax + 1)),
                   ratio(Real(p.a1 * x - q * p.a2), Real(absolute(p.a1) * ax + aq * absolute(p.a2))),
                   ratio(abs_form_p1(p, x, q), p1_scale), ratio(abs_form_p2(p, x, q), p2_scale)});
}

template <RealScalar Real>
Real abs_form_beta(const FamilyParameters<Real>& p, const Real& x, const Real& q) {
  const Real x2 = x * x;
  const Real d = (q + 1) * (q * p.a1 * p.b2 + p.a2 * p.b1) - q * (p.s1 + p.s2 + (p.a1 + p.a2) * p.b0);
  const Real numerator = q * p.b0 * (x2 - 1) * (p.a1 * p.a1 * x2 - p.a2 * p.a2) +
                         d * x * (x - 1) * (p.a1 * x - p.a2) -
                         (q * p.s1 - p.s2) * (p.a1 - q * p.a2) * x2;
  const Real d0 = resonance_factor(Real(p.a1 * q), x2, Real(1), p.a2, "a1 q x^2 - a2");
  const Real d1 = resonance_factor(p.a1, x2, q, p.a2, "a1 x^2 - q a2");
  return numerator / (d0 * d1);
}

template <RealScalar Real>
Real yz_form_alpha(const CanonicalParameters<Real>& c, const Real& x, const Real& q) {
  const Real x2 = x * x;
  const Real q2 = q * q;
  if (uses_cubic_numerator(c.family_case)) {
    const Real A = -(q * q2 - q2 * c.e1 * x + q * c.e2 * x2 - c.e3 * x2 * x);
    const Real B = c.z1 * c.z1 * x2 * x - q * c.e1 * c.z1 * x2 + q2 * c.e2 * x - q2 * c.z2;
    const Real d1 = resonance_factor(c.z1, x2, q, Real(1), "z1 x^2 - q");
    const Real d2 = resonance_factor(c.z1, x2, q2, Real(1), "z1 x^2 - q^2");
    const Real d3 = resonance_factor(c.z1, x2, Real(q2 * q), Real(1), "z1 x^2 - q^3");
    return c.b2 * c.b2 * (x - 1) * (c.z1 * x - q2) * A * B / (d1 * d2 * d2 * d3);
  }
  if (is_a2_zero_case(c.family_case)) {
    return c.b2 * c.b2 * (x - 1) * (x - c.p) * (x2 * c.e2 - q * x * c.e1 + q2 * c.p) /
           (q * x2 * x2);
  }
  if (is_b2_zero_case(c.family_case)) {
    const Real d1 = resonance_factor(c.z1, x2, q, Real(1), "z1 x^2 - q");
    const Real d2 = resonance_factor(c.z1, x2, q2, Real(1), "z1 x^2 - q^2");
    const Real d3 = resonance_factor(c.z1, x2, Real(q2 * q), Real(1), "z1 x^2 - q^3");
    return -q * c.b1 * c.b1 * x * (x - 1) * (x * c.z1 - q2) *
           (x2 * c.z1 - q * x * c.e1 + q2 * c.p) * (x2 * c.p * c.z1 - q * x * c.e1 + q2) /
           (d1 * d2 * d2 * d3);
  }
  return -q * c.p * c.b1 * c.b1 * (x - 1) * (x2 * c.e2 - q * x * c.e1 + q2 * c.p) / (x2 * x2);
}

template <RealScalar Real>
Real yz_form_beta(const CanonicalParameters<Real>& c, const Real& x, const Real& q) {
  const Real x2 = x * x;
  const Real q2 = q * q;
  if (uses_cubic_numerator(c.family_case)) {
    const Real K = c.z1 + q * c.e1 + c.e2 + c.z2;
    const Real linear = -(q + 1) * ((q + c.e1) * c.z1 + q * c.e2 + c.e3);
    const Real d0 = resonance_factor(c.z1, x2, Real(1), Real(1), "z1 x^2 - 1");
    const Real d2 = resonance_factor(c.z1, x2, q2, Real(1), "z1 x^2 - q^2");
    return c.b0 + c.b2 * x * (c.z1 * K * x2 + linear * x + q * K) / (d0 * d2);
  }
  if (is_a2_zero_case(c.family_case)) {
    return c.b0 + (c.b2 / q) * ((c.p * q + q + c.e1) * x - c.p * (q + 1)) / x2;
  }
  if (is_b2_zero_case(c.family_case)) {
    const Real kappa = c.e1 + c.p * q + q;
    const Real d0 = resonance_factor(c.z1, x2, Real(1), Real(1), "z1 x^2 - 1");
    const Real d2 = resonance_factor(c.z1, x2, q2, Real(1), "z1 x^2 - q^2");
    return c.b0 + c.b1 * x *
                      (c.z1 * kappa * x2 - (q + 1) * (q * c.e1 + (c.p + 1) * c.z1) * x +
                       q * kappa) /
                      (d0 * d2);
  }
  return c.b0 + c.b1 * ((c.e1 + q * c.p) * x - (q + 1) * c.p) / x2;
}

template <RealScalar Real>
RecurrenceCoefficients<Real> recurrence_coefficients(const FamilyParameters<Real>& params,
                                                     std::size_t nmax, RecurrenceRoute route,
                                                     const QContext<Real>& ctx) {
  RecurrenceCoefficients<Real> out;
  out.route = route;
  out.alpha.assign(nmax + 1, Real(0));
  out.beta.assign(nmax + 1, Real(0));
  const Real& q = ctx.q();
  switch (route) {
    case RecurrenceRoute::Direct: {
      const auto seq = build_sequences(params, nmax + 1, ctx, SequenceRequirement::RecurrenceOnly);
      for (std::size_t n = 0; n <= nmax; ++n) {
        if (n >= 1) out.alpha[n] = direct_alpha(seq, n).value;
        out.beta[n] = direct_beta(seq, n).value;
      }
      break;
    }
    case RecurrenceRoute::AbsForm: {
      if (params.a1 == 0 && params.a2 == 0) {
        throw Error(ErrorKind::DegenerateFamily, "a1 and a2 are both zero");
      }
      for (std::size_t n = 0; n <= nmax; ++n) {
        const Real x = ipow(q, static_cast<std::int64_t>(n));
        if (n >= 1) out.alpha[n] = abs_form_alpha(params, x, q);
        out.beta[n] = abs_form_beta(params, x, q);
      }
      break;
    }
    case RecurrenceRoute::YzForm: {
      const auto canonical = canonicalize(params, ctx);
      for (std::size_t n = 0; n <= nmax; ++n) {
        const Real x = ipow(q, static_cast<std::int64_t>(n));
        if (n >= 1) out.alpha[n] = yz_form_alpha(canonical, x, q);
        out.beta[n] = yz_form_beta(canonical, x, q);
      }
      break;
    }
  }
  return out;
}

template <RealScalar Real>
Real connection_entry_yz(const CanonicalParameters<Real>& c, std::size_t n, std::size_t k,
                         const QContext<Real>& ctx) {
  if (!uses_cubic_numerator(c.family_case)) {
    throw Error(ErrorKind::InvalidCase, "closed-form C entries need a cubic-numerator case");
  }
  if (k > n) throw Error(ErrorKind::IndexOutOfRange, "C entries need k <= n");
  const Real& q = ctx.q();
  const std::size_t span = n - k;
  ScaledProduct<Real> value;
  value.multiply_power(c.b2, span);
  value /= ipow(q, static_cast<std::int64_t>(span * k));
  const Real qk = ipow(q, static_cast<std::int64_t>(k));
  Real u = qk;
  for (std::size_t i = k; i < n; ++i) {
    value *= numerator_factor(c, u);
    u *= q;
  }
  value *= q_pochhammer(Real(qk * q), span, ctx);
  value /= q_pochhammer(q, span, ctx);
  value /= q_pochhammer(Real(c.z1 * ipow(q, static_cast<std::int64_t>(n + k) - 1)), span, ctx);
  return value.value();
}

template <RealScalar Real>
std::vector<Real> polynomial_sweep(const RecurrenceCoefficients<Real>& rec, std::size_t nmax,
                                   const Real& t) {
  if (nmax > rec.beta.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "recurrence table too short for the sweep");
  }
  std::vector<Real> u;
  u.reserve(nmax + 1);
  u.push_back(Real(1));
  if (nmax >= 1) u.push_back(t - rec.beta[0]);
  for (std::size_t n = 1; n < nmax; ++n) {
    u.push_back((t - rec.beta[n]) * u[n] - rec.alpha[n] * u[n - 1]);
  }
  return u;
}

template <RealScalar Real>
Real polynomial_values(const FamilyParameters<Real>& params, std::size_t n, const Real& t,
                       PolynomialMethod method, const QContext<Real>& ctx) {
  if (method == PolynomialMethod::Recurrence) {
    const auto rec = recurrence_coefficients(params, n, RecurrenceRoute::Direct, ctx);
    return polynomial_sweep(rec, n, t).back();
  }
  const auto seq = build_sequences(params, n, ctx, SequenceRequirement::RecurrenceOnly);
  const auto cm = connection_matrices(seq, n + 1, ctx);
  Real value(0);
  Real newton(1);
  for (std::size_t k = 0; k <= n; ++k) {
    value += cm.c[n][k] * newton;
    newton *= t - seq.x(k);
  }
  return value;
}

template <RealScalar Real>
EigenResidual<Real> eigen_residual(const FamilyParameters<Real>& params, std::size_t n,
                                   const QContext<Real>& ctx) {
  EigenResidual<Real> out;
  out.n = n;
  const auto seq = build_sequences(params, std::max<std::size_t>(n, 1), ctx,
                                   SequenceRequirement::RecurrenceOnly);
  const auto cm = connection_matrices(seq, n + 1, ctx);
  const auto& row = cm.c[n];
  const Real& hn = seq.h(n);
  Real worst(0);
  Real scale(0);
  for (std::size_t k = 0; k <= n; ++k) {
    Real applied = seq.h(k) * row[k];
    Real terms = absolute(applied) + absolute(Real(hn * row[k]));
    if (k < n) {
      applied += seq.g(k + 1) * row[k + 1];
      terms += absolute(Real(seq.g(k + 1) * row[k + 1]));
    }
    worst = std::max(worst, absolute(Real(applied - hn * row[k])));
    scale = std::max(scale, terms);
  }
  out.residual = scale == 0 ? Real(0) : Real(worst / scale);
  return out;
}

#define QASKEY_INSTANTIATE(Real)                                                                  \
  template ConnectionMatrices<Real> connection_matrices(const SequenceSet<Real>&, std::size_t,    \
                                                        const QContext<Real>&);                   \
  template std::vector<Real> moments(const SequenceSet<Real>&, std::size_t,                       \
                                     const QContext<Real>&);                                      \
  template ScaledValue<Real> direct_alpha(const SequenceSet<Real>&, std::size_t);                 \
  template ScaledValue<Real> direct_beta(const SequenceSet<Real>&, std::size_t);                  \
  template Real abs_form_p1(const FamilyParameters<Real>&, const Real&, const Real&);             \
  template Real abs_form_p2(const FamilyParameters<Real>&, const Real&, const Real&);             \
  template Real abs_form_p2_from_p1(const FamilyParameters<Real>&, const Real&, const Real&);     \
  template Real abs_form_alpha(const FamilyParameters<Real>&, const Real&, const Real&);          \
  template Real abs_form_beta(const FamilyParameters<Real>&, const Real&, const Real&);           \
  template double alpha_vanishing_ratio(const FamilyParameters<Real>&, std::size_t, const Real&);           \
  template Real yz_form_alpha(const CanonicalParameters<Real>&, const Real&, const Real&);        \
  template Real yz_form_beta(const CanonicalParameters<Real>&, const Real&, const Real&);         \
  template RecurrenceCoefficients<Real> recurrence_coefficients(                                  \
      const FamilyParameters<Real>&, std::size_t, RecurrenceRoute, const QContext<Real>&);        \
  template Real connection_entry_yz(const CanonicalParameters<Real>&, std::size_t, std::size_t,  \
                                    const QContext<Real>&);                                       \
  template std::vector<Real> polynomial_sweep(const RecurrenceCoefficients<Real>&, std::size_t,   \
                                              const Real&);                                       \
  template Real polynomial_values(const FamilyParameters<Real>&, std::size_t, const Real&,        \
                                  PolynomialMethod, const QContext<Real>&);                       \
  template EigenResidual<Real> eigen_residual(const FamilyParameters<Real>&, std::size_t,         \
                                              const QContext<Real>&);

QASKEY_INSTANTIATE(double)
QASKEY_INSTANTIATE(BigReal)

}  // namespace qaskey
