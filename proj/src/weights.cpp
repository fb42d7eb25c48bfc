#include "qaskey/weights.hpp"

#include <algorithm>
#include <string>

#include "qaskey/connection.hpp"

namespace qaskey {

namespace {

constexpr std::size_t kTerminationScan = 4096;
/// Below this |q^i| a numerator factor is p or 1 to working precision, so an
/// exact zero there is underflow, not termination.
constexpr double kNegligiblePower = 1e-150;

template <RealScalar Real>
Real absolute(const Real& v) {
  using std::abs;
  return abs(v);
}

template <RealScalar Real>
void require_nonzero(const Real& factor, const Real& scale, const char* what) {
  if (absolute(factor) <= 1000 * machine_epsilon<Real>() * scale) {
    throw Error(ErrorKind::ZeroDenominator, std::string(what) + " has a vanishing factor");
  }
}

/// Divides `acc` by (t; q)_count, rejecting resonant factors.
template <RealScalar Real>
void divide_pochhammer(ScaledProduct<Real>& acc, const Real& t, std::size_t count, const Real& q,
                       const char* what) {
  Real shifted = t;
  for (std::size_t i = 0; i < count; ++i) {
    const Real factor = 1 - shifted;
    require_nonzero(factor, Real(1 + absolute(shifted)), what);
    acc /= factor;
    shifted *= q;
  }
}

template <RealScalar Real>
void multiply_pochhammer(ScaledProduct<Real>& acc, const Real& t, std::size_t count,
                         const Real& q) {
  Real shifted = t;
  for (std::size_t i = 0; i < count; ++i) {
    acc *= Real(1 - shifted);
    shifted *= q;
  }
}

std::int64_t as_signed(std::size_t v) { return static_cast<std::int64_t>(v); }

template <RealScalar Real>
ScaledProduct<Real> mu_scaled(const CanonicalParameters<Real>& c, std::size_t k,
                              const QContext<Real>& ctx) {
  ScaledProduct<Real> out;
  if (k == 0) return out;
  const Real& q = ctx.q();
  if (k % 2 == 1) out *= Real(-1);
  out.multiply_power(q, k * (k - 1) / 2);
  divide_pochhammer(out, q, k, q, "(q;q)_k");
  if (c.z2 != 0) {
    const Real lower = ipow(q, as_signed(k) - 1) * c.z2;
    require_nonzero(Real(1 - lower), Real(1 + absolute(lower)), "1 - q^{k-1} z2");
    out *= Real(1 - ipow(q, 2 * as_signed(k) - 1) * c.z2);
    out /= Real(1 - lower);
  }
  return out;
}

template <RealScalar Real>
ScaledProduct<Real> rho_scaled(const RhoGenerator<Real>& gen, std::size_t k, std::size_t j,
                               const QContext<Real>& ctx) {
  if (k > j) throw Error(ErrorKind::IndexOutOfRange, "rho(k, j) needs j >= k");
  if (gen.termination_index && j > *gen.termination_index) return ScaledProduct<Real>(Real(0));
  const auto& c = gen.canonical;
  const Real& q = ctx.q();
  ScaledProduct<Real> out = mu_scaled(c, k, ctx);
  Real u(1);
  for (std::size_t i = 0; i < j; ++i) {
    out *= numerator_factor(c, u);
    u *= q;
  }
  if (out.is_zero()) return out;
  divide_pochhammer(out, q, j - k, q, "(q;q)_{j-k}");
  const Real qk = ipow(q, as_signed(k));
  if (uses_cubic_numerator(c.family_case)) {
    out.multiply_power(q, j);
    divide_pochhammer(out, c.z1, j, q, "(z1;q)_j");
    divide_pochhammer(out, Real(qk * c.z2), j, q, "(q^k z2;q)_j");
  } else if (is_a2_zero_case(c.family_case)) {
    divide_pochhammer(out, Real(qk * c.z2), j, q, "(q^k z2;q)_j");
  } else if (is_b2_zero_case(c.family_case)) {
    if (j >= 1) {
      ScaledProduct<Real> shift;
      shift.multiply_power(q, k * (j - 1));
      out /= shift;
    }
    divide_pochhammer(out, c.z1, j, q, "(z1;q)_j");
  } else {
    if (j % 2 == 1) out *= Real(-1);
    ScaledProduct<Real> shift;
    shift.multiply_power(q, j * (j - 1) / 2 + (j >= 1 ? k * (j - 1) : 0));
    out /= shift;
  }
  return out;
}

/// rho(k, j+1) / rho(k, j); exactly zero when the next term vanishes.
template <RealScalar Real>
Real next_term_ratio(const CanonicalParameters<Real>& c, std::size_t k, std::size_t j,
                     const Real& qj, const Real& qk, const QContext<Real>& ctx) {
  const Real& q = ctx.q();
  const Real numerator = numerator_factor(c, qj);
  if (numerator == 0) return Real(0);
  const Real step = 1 - ipow(q, as_signed(j - k) + 1);
  if (uses_cubic_numerator(c.family_case)) {
    const Real z1_factor = 1 - c.z1 * qj;
    const Real z2_factor = 1 - qk * qj * c.z2;
    require_nonzero(z1_factor, Real(1 + absolute(Real(c.z1 * qj))), "(z1;q)_j");
    require_nonzero(z2_factor, Real(1 + absolute(Real(qk * qj * c.z2))), "(q^k z2;q)_j");
    return numerator * q / (step * z1_factor * z2_factor);
  }
  if (is_a2_zero_case(c.family_case)) {
    const Real z2_factor = 1 - qk * qj * c.z2;
    require_nonzero(z2_factor, Real(1 + absolute(Real(qk * qj * c.z2))), "(q^k z2;q)_j");
    return numerator / (step * z2_factor);
  }
  if (is_b2_zero_case(c.family_case)) {
    const Real z1_factor = 1 - c.z1 * qj;
    require_nonzero(z1_factor, Real(1 + absolute(Real(c.z1 * qj))), "(z1;q)_j");
    return numerator / (qk * step * z1_factor);
  }
  return -numerator / (qj * qk * step);
}

template <RealScalar Real>
Real relative_gap(const Real& a, const Real& b) {
  const Real scale = std::max(absolute(a), absolute(b));
  if (scale == 0) return Real(0);
  return absolute(Real(a - b)) / scale;
}

}  // namespace

template <RealScalar Real>
RhoGenerator<Real> make_rho_generator(const CanonicalParameters<Real>& canonical,
                                      const QContext<Real>& ctx,
                                      std::optional<std::size_t> declared_termination) {
  RhoGenerator<Real> gen{canonical, declared_termination};
  if (gen.termination_index) return gen;
  Real u(1);
  const std::size_t scan = std::min(kTerminationScan, ctx.max_terms());
  for (std::size_t i = 0; i < scan && absolute(u) > kNegligiblePower; ++i) {
    if (numerator_factor(canonical, u) == 0) {
      gen.termination_index = i;
      break;
    }
    u *= ctx.q();
  }
  return gen;
}

template <RealScalar Real>
Real mu(const CanonicalParameters<Real>& canonical, std::size_t k, const QContext<Real>& ctx) {
  return mu_scaled(canonical, k, ctx).value();
}

template <RealScalar Real>
Real rho(const RhoGenerator<Real>& gen, std::size_t k, std::size_t j, const QContext<Real>& ctx) {
  return rho_scaled(gen, k, j, ctx).value();
}

template <RealScalar Real>
Real rho_raw(const SequenceSet<Real>& seq, const std::vector<Real>& moments, std::size_t k,
             std::size_t j) {
  if (k > j) throw Error(ErrorKind::IndexOutOfRange, "rho_raw(k, j) needs j >= k");
  if (j >= moments.size()) throw Error(ErrorKind::IndexOutOfRange, "moment table too short");
  return moments[j] / newton_node_derivative(seq, j, k);
}

template <RealScalar Real>
SeriesResult<Real> weight(const RhoGenerator<Real>& gen, std::size_t k, const QContext<Real>& ctx) {
  SeriesResult<Real> out;
  if (gen.termination_index && k > *gen.termination_index) {
    out.terminated = true;
    return out;
  }
  if (!ctx.is_contracting()) {
    throw Error(ErrorKind::NoConvergence, "weights need |q| < 1; invert the family first");
  }
  const ScaledProduct<Real> lead = rho_scaled(gen, k, k, ctx);
  if (lead.is_zero()) {
    out.terminated = true;
    return out;
  }
  const Real& q = ctx.q();
  const Real qk = ipow(q, as_signed(k));
  Real term(1);
  Real qj = qk;
  const auto last = gen.termination_index;
  auto relative_terms = [&](std::size_t j) {
    SeriesTerm<Real> current{term, last && j == *last};
    if (!current.last) {
      const Real ratio = next_term_ratio(gen.canonical, k, j, qj, qk, ctx);
      if (ratio == 0) current.last = true;
      term *= ratio;
      qj *= q;
    }
    return current;
  };
  const SeriesResult<Real> relative = sum_tail_bounded(relative_terms, k, ctx);
  const Real scale = lead.value();
  out.value = relative.value * scale;
  out.tail_bound = relative.tail_bound * absolute(scale);
  out.terms_used = relative.terms_used;
  out.terminated = relative.terminated;
  return out;
}

template <RealScalar Real>
WeightTable<Real> weight_table(const RhoGenerator<Real>& gen, const SequenceSet<Real>& seq,
                               std::size_t last_index, const QContext<Real>& ctx) {
  WeightTable<Real> table;
  table.nodes.reserve(last_index + 1);
  table.weights.reserve(last_index + 1);
  table.diagnostics.reserve(last_index + 1);
  for (std::size_t k = 0; k <= last_index; ++k) {
    table.nodes.push_back(seq.x(k));
    auto entry = weight(gen, k, ctx);
    table.weights.push_back(entry.value);
    table.diagnostics.push_back(std::move(entry));
  }
  if (gen.termination_index) {
    table.finite = true;
    table.finite_node_count = *gen.termination_index + 1;
  }
  return table;
}

template <RealScalar Real>
WeightTable<Real> family_weight_table(const FamilyParameters<Real>& params, std::size_t last_index,
                                      const QContext<Real>& ctx,
                                      std::optional<std::size_t> declared_termination) {
  const auto form = contracting_form(params, ctx);
  const auto gen =
      make_rho_generator(canonicalize(form.params, form.ctx), form.ctx, declared_termination);
  const auto seq = build_sequences(form.params, last_index, form.ctx);
  return weight_table(gen, seq, last_index, form.ctx);
}

template <RealScalar Real>
Real rho_ratio_in_k(const CanonicalParameters<Real>& c, std::size_t k, std::size_t j,
                    const QContext<Real>& ctx) {
  if (!has_z2_structure(c.family_case)) {
    throw Error(ErrorKind::InvalidCase, "the ratio identity needs a case with the z2 factor");
  }
  if (k >= j) throw Error(ErrorKind::IndexOutOfRange, "ratio identity needs k < j");
  const Real& q = ctx.q();
  const std::int64_t kk = as_signed(k);
  const std::int64_t jj = as_signed(j);
  const Real& z2 = c.z2;
  const Real numerator = -ipow(q, kk) * (1 - ipow(q, jj - kk)) *
                         (1 - ipow(q, 2 * kk + 1) * z2) * (1 - ipow(q, kk - 1) * z2);
  const Real denominator = (1 - ipow(q, kk + 1)) * (1 - ipow(q, 2 * kk - 1) * z2) *
                           (1 - ipow(q, jj + kk) * z2);
  require_nonzero(denominator, Real(1), "ratio identity denominator");
  return numerator / denominator;
}

template <RealScalar Real>
Real rho_hadamard(const RhoGenerator<Real>& gen, std::size_t k, std::size_t j,
                  const QContext<Real>& ctx) {
  const auto& c = gen.canonical;
  if (!has_z2_structure(c.family_case)) {
    throw Error(ErrorKind::InvalidCase, "the Hadamard identity needs a case with the z2 factor");
  }
  if (k > j) throw Error(ErrorKind::IndexOutOfRange, "rho(k, j) needs j >= k");
  const Real& q = ctx.q();
  ScaledProduct<Real> out = rho_scaled(gen, 0, j, ctx);
  out *= mu_scaled(c, k, ctx);
  multiply_pochhammer(out, c.z2, k, q);
  multiply_pochhammer(out, ipow(q, as_signed(j - k) + 1), k, q);
  divide_pochhammer(out, Real(ipow(q, as_signed(j)) * c.z2), k, q, "(q^j z2;q)_k");
  return out.value();
}

template <RealScalar Real>
CoefficientReport<Real> coefficient_checks(const RhoGenerator<Real>& gen,
                                           const SequenceSet<Real>& seq, std::size_t jmax,
                                           const QContext<Real>& ctx) {
  CoefficientReport<Real> report;
  const auto m = moments(seq, jmax, ctx);
  const bool z2_cases = has_z2_structure(gen.canonical.family_case);
  if (z2_cases) {
    report.ratio_identity = Real(0);
    report.hadamard = Real(0);
  }
  for (std::size_t j = 0; j <= jmax; ++j) {
    std::vector<Real> row;
    row.reserve(j + 1);
    Real sum(0);
    Real largest(0);
    for (std::size_t k = 0; k <= j; ++k) {
      row.push_back(rho(gen, k, j, ctx));
      sum += row.back();
      largest = std::max(largest, absolute(row.back()));
      // past N the raw moments are cancellation noise around zero
      if (gen.termination_index && j > *gen.termination_index) continue;
      report.raw_oracle = std::max(report.raw_oracle, relative_gap(row.back(), rho_raw(seq, m, k, j)));
    }
    if (j >= 1 && largest != 0) {
      report.sum_rule = std::max(report.sum_rule, Real(absolute(sum) / largest));
    }
    if (!z2_cases) continue;
    for (std::size_t k = 0; k < j; ++k) {
      if (row[k] == 0) continue;
      const Real predicted = rho_ratio_in_k(gen.canonical, k, j, ctx);
      *report.ratio_identity =
          std::max(*report.ratio_identity, relative_gap(Real(row[k + 1] / row[k]), predicted));
    }
    for (std::size_t k = 1; k <= j; ++k) {
      *report.hadamard = std::max(*report.hadamard, relative_gap(row[k], rho_hadamard(gen, k, j, ctx)));
    }
  }
  return report;
}

#define QASKEY_INSTANTIATE(Real)                                                                  \
  template RhoGenerator<Real> make_rho_generator(const CanonicalParameters<Real>&,               \
                                                 const QContext<Real>&,                          \
                                                 std::optional<std::size_t>);                    \
  template Real mu(const CanonicalParameters<Real>&, std::size_t, const QContext<Real>&);         \
  template Real rho(const RhoGenerator<Real>&, std::size_t, std::size_t, const QContext<Real>&);  \
  template Real rho_raw(const SequenceSet<Real>&, const std::vector<Real>&, std::size_t,          \
                        std::size_t);                                                             \
  template SeriesResult<Real> weight(const RhoGenerator<Real>&, std::size_t,                      \
                                     const QContext<Real>&);                                      \
  template WeightTable<Real> weight_table(const RhoGenerator<Real>&, const SequenceSet<Real>&,    \
                                          std::size_t, const QContext<Real>&);                    \
  template WeightTable<Real> family_weight_table(const FamilyParameters<Real>&, std::size_t,      \
                                                 const QContext<Real>&,                           \
                                                 std::optional<std::size_t>);                     \
  template Real rho_ratio_in_k(const CanonicalParameters<Real>&, std::size_t, std::size_t,        \
                               const QContext<Real>&);                                            \
  template Real rho_hadamard(const RhoGenerator<Real>&, std::size_t, std::size_t,                 \
                             const QContext<Real>&);                                              \
  template CoefficientReport<Real> coefficient_checks(const RhoGenerator<Real>&,                  \
                                                      const SequenceSet<Real>&, std::size_t,      \
                                                      const QContext<Real>&);

QASKEY_INSTANTIATE(double)
QASKEY_INSTANTIATE(BigReal)

}  // namespace qaskey
