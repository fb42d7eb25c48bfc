#include "qaskey/lattice.hpp"

#include <algorithm>
#include <string>

#include "qaskey/connection.hpp"

namespace qaskey {

namespace {

template <RealScalar Real>
void require_structure(const FamilyParameters<Real>& p, SequenceRequirement requirement) {
  if (p.a1 == 0 && p.a2 == 0) {
    throw Error(ErrorKind::DegenerateFamily, "a1 and a2 are both zero");
  }
  if (requirement == SequenceRequirement::Nodes && p.b1 == 0 && p.b2 == 0) {
    throw Error(ErrorKind::DegenerateFamily, "b1 and b2 are both zero: the nodes coincide");
  }
}

template <RealScalar Real>
double relative(const Real& value, const Real& scale) {
  using std::abs;
  if (scale == 0) return 0.0;
  return to_double(Real(abs(value) / scale));
}

}  // namespace

template <RealScalar Real>
SequenceSet<Real>::SequenceSet(const FamilyParameters<Real>& params, std::size_t max_index,
                               const QContext<Real>& ctx)
    : params_(params), q_(ctx.q()), tol_(ctx.tol()), max_terms_(ctx.max_terms()) {
  const std::size_t size = max_index + 1;
  x_.reserve(size);
  h_.reserve(size);
  d_.reserve(size);
  g_.reserve(size);
  const Real s0 = -params.s1 - params.s2;
  for (std::size_t k = 0; k < size; ++k) {
    const Real up = ipow(q_, static_cast<std::int64_t>(k));
    const Real down = ipow(q_, -static_cast<std::int64_t>(k));
    x_.push_back(params.b0 + params.b1 * up + params.b2 * down);
    h_.push_back(params.a1 * up + params.a2 * down);
    d_.push_back(s0 + params.s1 * up + params.s2 * down);
  }
  g_.push_back(Real(0));
  for (std::size_t k = 1; k < size; ++k) {
    g_.push_back(x_[k - 1] * (h_[k] - h_[0]) + d_[k]);
  }
}

template <RealScalar Real>
const Real& SequenceSet<Real>::at(const std::vector<Real>& table, std::size_t k) const {
  if (k >= table.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "sequence index " + std::to_string(k) +
                                                " beyond max_index " +
                                                std::to_string(table.size() - 1));
  }
  return table[k];
}

template <RealScalar Real>
SequenceSet<Real> SequenceSet<Real>::extended(std::size_t max_index) const {
  std::size_t target = std::max<std::size_t>(this->max_index(), 1);
  while (target < max_index) target *= 2;
  return SequenceSet(params_, target, QContext<Real>(q_, tol_, max_terms_));
}

template <RealScalar Real>
SequenceSet<Real> build_sequences(const FamilyParameters<Real>& params, std::size_t max_index,
                                  const QContext<Real>& ctx, SequenceRequirement requirement) {
  require_structure(params, requirement);
  return SequenceSet<Real>(params, max_index, ctx);
}

template <RealScalar Real>
Real newton_eval(const SequenceSet<Real>& seq, std::size_t n, const Real& t) {
  if (n > seq.max_index()) {
    throw Error(ErrorKind::IndexOutOfRange, "Newton degree " + std::to_string(n) +
                                                " beyond max_index");
  }
  Real value(1);
  for (std::size_t i = 0; i < n; ++i) value *= t - seq.x(i);
  return value;
}

template <RealScalar Real>
Real newton_node_derivative(const SequenceSet<Real>& seq, std::size_t j, std::size_t k) {
  if (k > j || j + 1 > seq.max_index()) {
    throw Error(ErrorKind::IndexOutOfRange, "node derivative needs 0 <= k <= j <= max_index - 1");
  }
  Real value(1);
  const Real& node = seq.x(k);
  for (std::size_t i = 0; i <= j; ++i) {
    if (i != k) value *= node - seq.x(i);
  }
  return value;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::APairZero: return "a-pair-zero";
    case ViolationKind::BPairZero: return "b-pair-zero";
    case ViolationKind::CoincidentH: return "coincident-h";
    case ViolationKind::CoincidentX: return "coincident-x";
    case ViolationKind::VanishingG: return "vanishing-g";
    case ViolationKind::VanishingAlpha: return "vanishing-alpha";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

template <RealScalar Real>
ValidationReport validate_family(const FamilyParameters<Real>& params, std::size_t max_index,
                                 const QContext<Real>& ctx) {
  using std::abs;
  ValidationReport report;
  auto flag = [&report](ViolationKind kind, std::size_t i, std::size_t j, double magnitude) {
    report.violations.push_back({kind, i, j, magnitude});
  };

  const bool a_zero = params.a1 == 0 && params.a2 == 0;
  const bool b_zero = params.b1 == 0 && params.b2 == 0;
  if (a_zero) flag(ViolationKind::APairZero, 0, 0, 0.0);
  if (b_zero) flag(ViolationKind::BPairZero, 0, 0, 0.0);
  if (a_zero) {
    report.ok = false;
    return report;
  }

  // One extra entry so alpha_{max_index} can use g_{max_index + 1}.
  const SequenceSet<Real> seq(params, max_index + 1, ctx);
  const Real threshold = 1000 * machine_epsilon<Real>();
  for (std::size_t k = 1; k <= max_index; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (nearly_equal(seq.h(j), seq.h(k))) {
        flag(ViolationKind::CoincidentH, j, k, relative(Real(seq.h(k) - seq.h(j)), abs(seq.h(k))));
      }
      if (!b_zero && nearly_equal(seq.x(j), seq.x(k))) {
        flag(ViolationKind::CoincidentX, j, k, relative(Real(seq.x(k) - seq.x(j)), abs(seq.x(k))));
      }
    }
    const Real g_scale = abs(seq.x(k - 1) * (seq.h(k) - seq.h(0))) + abs(seq.d(k));
    if (abs(seq.g(k)) <= threshold * g_scale) {
      flag(ViolationKind::VanishingG, k, k, relative(seq.g(k), g_scale));
    }
  }
  if (!report.has(ViolationKind::CoincidentH)) {
    for (std::size_t n = 1; n <= max_index; ++n) {
      const double ratio = alpha_vanishing_ratio(params, n, ctx.q());
      if (ratio <= to_double(threshold)) flag(ViolationKind::VanishingAlpha, n, n, ratio);
    }
  }
  report.ok = report.violations.empty();
  return report;
}

#define QASKEY_INSTANTIATE(Real)                                                              \
  template class SequenceSet<Real>;                                                           \
  template SequenceSet<Real> build_sequences(const FamilyParameters<Real>&, std::size_t,      \
                                             const QContext<Real>&, SequenceRequirement);     \
  template Real newton_eval(const SequenceSet<Real>&, std::size_t, const Real&);              \
  template Real newton_node_derivative(const SequenceSet<Real>&, std::size_t, std::size_t);   \
  template ValidationReport validate_family(const FamilyParameters<Real>&, std::size_t,       \
                                            const QContext<Real>&);

QASKEY_INSTANTIATE(double)
QASKEY_INSTANTIATE(BigReal)

}  // namespace qaskey
