#include "qaskey/verify.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace qaskey {

namespace {

template <RealScalar Real>
Real absolute(const Real& v) {
  using std::abs;
  return abs(v);
}

template <RealScalar Real>
Real smallest_normal() {
  if constexpr (std::is_same_v<Real, double>) {
    return std::numeric_limits<double>::min();
  } else {
    return boost::multiprecision::pow(BigReal(10), -2 * working_digits<BigReal>());
  }
}

}  // namespace

template <RealScalar Real>
std::vector<Real> moment_reconstruction(const WeightTable<Real>& table, const SequenceSet<Real>& seq,
                                        std::size_t kmax, const QContext<Real>& ctx) {
  const SequenceSet<Real> wide = seq.max_index() >= kmax ? seq : seq.extended(kmax);
  const auto m = moments(wide, kmax, ctx);
  std::optional<Real> smallest;
  for (const auto& value : m) {
    if (value != 0 && (!smallest || absolute(value) < *smallest)) smallest = absolute(value);
  }
  const Real scale = smallest.value_or(smallest_normal<Real>());
  const std::size_t used = truncation_length(table, kmax, ctx, [&](std::size_t) { return scale; });

  std::vector<CompensatedSum<Real>> sums(kmax + 1);
  for (std::size_t j = 0; j < used; ++j) {
    Real v(1);
    for (std::size_t k = 0; k <= kmax; ++k) {
      sums[k].add(v * table.weights[j]);
      v *= table.nodes[j] - wide.x(k);
    }
  }
  std::vector<Real> residuals;
  residuals.reserve(kmax + 1);
  for (std::size_t k = 0; k <= kmax; ++k) {
    const Real guard = std::max(absolute(m[k]), smallest_normal<Real>());
    residuals.push_back(absolute(Real(sums[k].value() - m[k])) / guard);
  }
  return residuals;
}

template <RealScalar Real>
OrthogonalityReport<Real> assemble_gram(const FamilyParameters<Real>& params,
                                        const WeightTable<Real>& table, std::size_t nmax,
                                        const QContext<Real>& ctx) {
  OrthogonalityReport<Real> report;
  report.nmax = nmax;
  // The closed form avoids the q^{-2n} cancellation of the direct route;
  // alpha_n is only used for the norm-ratio check.
  try {
    report.recurrence = recurrence_coefficients(params, nmax, RecurrenceRoute::AbsForm, ctx);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ZeroDenominator) throw;
    report.recurrence = recurrence_coefficients(params, nmax, RecurrenceRoute::Direct, ctx);
  }

  const std::size_t size = nmax + 1;
  // u_n(x_j) in the Newton basis on the node lattice: v_k(x_j) = 0 for k > j,
  // and the sum has no cancellation at the leading nodes, where the
  // three-term sweep would build tiny values from O(1) terms.
  const auto lattice = build_sequences(params, nmax + 1, ctx, SequenceRequirement::Nodes);
  const auto newton = connection_matrices(lattice, size, ctx);
  auto node_values = [&](std::size_t j) {
    std::vector<Real> u(size, Real(0));
    const Real& t = table.nodes[j];
    Real v(1);
    const std::size_t top = std::min(j, nmax);
    for (std::size_t k = 0; k <= top; ++k) {
      for (std::size_t n = k; n < size; ++n) u[n] += newton.c[n][k] * v;
      v *= t - lattice.x(k);
    }
    return u;
  };
  std::vector<std::vector<CompensatedSum<Real>>> sums(size, std::vector<CompensatedSum<Real>>(size));
  std::vector<std::vector<Real>> mass(size, std::vector<Real>(size, Real(0)));

  auto diagonal_scale = [&](std::size_t) {
    Real smallest = absolute(sums[0][0].value());
    for (std::size_t n = 1; n < size; ++n) smallest = std::min(smallest, absolute(sums[n][n].value()));
    return smallest;
  };
  // The truncation test runs as nodes are added, so the scale is the
  // running diagonal.
  std::size_t used = 0;
  std::size_t cursor = 0;
  auto accumulate_through = [&](std::size_t k) {
    for (; cursor <= k; ++cursor) {
      const auto u = node_values(cursor);
      const Real& r = table.weights[cursor];
      for (std::size_t n = 0; n < size; ++n) {
        const Real ur = u[n] * r;
        for (std::size_t m = 0; m <= n; ++m) {
          const Real contribution = ur * u[m];
          sums[n][m].add(contribution);
          mass[n][m] += absolute(contribution);
        }
      }
    }
  };
  used = truncation_length(table, 2 * nmax, ctx, [&](std::size_t k) {
    accumulate_through(k);
    return diagonal_scale(k);
  });
  accumulate_through(used - 1);
  report.node_count_used = used;

  report.gram.assign(size, std::vector<Real>(size, Real(0)));
  for (std::size_t n = 0; n < size; ++n) {
    for (std::size_t m = 0; m <= n; ++m) {
      report.gram[n][m] = sums[n][m].value();
      report.gram[m][n] = report.gram[n][m];
    }
  }
  report.K.reserve(size);
  report.diagonal_mass.reserve(size);
  for (std::size_t n = 0; n < size; ++n) {
    report.K.push_back(report.gram[n][n]);
    report.diagonal_mass.push_back(mass[n][n]);
  }
  for (std::size_t n = 0; n < size; ++n) {
    for (std::size_t m = 0; m <= n; ++m) {
      using std::sqrt;
      const Real norm = sqrt(absolute(Real(report.K[n] * report.K[m])));
      report.condition = std::max(report.condition, Real(mass[n][m] / norm));
      if (m != n) {
        report.max_offdiag_residual =
            std::max(report.max_offdiag_residual, Real(absolute(report.gram[n][m]) / norm));
      }
    }
  }
  report.norm_ratio_defects.assign(size, Real(0));
  for (std::size_t n = 1; n < size; ++n) {
    const Real predicted = report.recurrence.alpha[n] * report.K[n - 1];
    report.norm_ratio_defects[n] = absolute(Real(report.K[n] - predicted)) / absolute(report.K[n]);
  }
  const double threshold = to_double(Real(1000 * machine_epsilon<Real>()));
  for (std::size_t n = 1; n <= nmax; ++n) {
    if (alpha_vanishing_ratio(params, n, ctx.q()) <= threshold) report.favard_ok = false;
  }
  return report;
}

template <RealScalar Real>
void check_norms(const OrthogonalityReport<Real>& report, const QContext<Real>& ctx) {
  for (std::size_t n = 0; n < report.K.size(); ++n) {
    if (absolute(report.K[n]) < 1000 * ctx.tol() * report.diagonal_mass[n]) {
      throw Error(ErrorKind::DegenerateNorm, "K_" + std::to_string(n) + " is numerically zero");
    }
  }
}

template <RealScalar Real>
OrthogonalityReport<Real> gram_matrix(const FamilyParameters<Real>& params,
                                      const WeightTable<Real>& table, std::size_t nmax,
                                      const QContext<Real>& ctx) {
  auto report = assemble_gram(params, table, nmax, ctx);
  check_norms(report, ctx);
  return report;
}

template <RealScalar Real>
VerificationResult<Real> verify_family(const FamilyParameters<Real>& params,
                                       const QContext<Real>& ctx, const VerifyOptions& options) {
  const auto form = contracting_form(params, ctx);
  const auto gen = make_rho_generator(canonicalize(form.params, form.ctx), form.ctx,
                                      options.termination_index);
  std::size_t nodes = gen.termination_index ? *gen.termination_index + 1 : options.initial_nodes;
  const std::size_t reach = std::max(options.nmax, options.moment_kmax) + 1;
  for (;;) {
    const auto seq = build_sequences(form.params, std::max(nodes - 1, reach), form.ctx);
    try {
      VerificationResult<Real> result;
      result.table = weight_table(gen, seq, nodes - 1, form.ctx);
      result.report = gram_matrix(form.params, result.table, options.nmax, form.ctx);
      // past N the moments vanish and relative residuals lose meaning
      const std::size_t kmax = gen.termination_index
                                   ? std::min(options.moment_kmax, *gen.termination_index)
                                   : options.moment_kmax;
      result.report.moment_residuals = moment_reconstruction(result.table, seq, kmax, form.ctx);
      CompensatedSum<Real> total;
      for (const auto& r : result.table.weights) total.add(r);
      result.weight_sum = total.value();
      return result;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientNodes || nodes >= options.max_nodes) throw;
      nodes = std::min(nodes * 2, options.max_nodes);
    }
  }
}

#define QASKEY_INSTANTIATE(Real)                                                                  \
  template std::vector<Real> moment_reconstruction(const WeightTable<Real>&,                      \
                                                   const SequenceSet<Real>&, std::size_t,         \
                                                   const QContext<Real>&);                        \
  template OrthogonalityReport<Real> assemble_gram(const FamilyParameters<Real>&,                 \
                                                   const WeightTable<Real>&, std::size_t,         \
                                                   const QContext<Real>&);                        \
  template void check_norms(const OrthogonalityReport<Real>&, const QContext<Real>&);             \
  template OrthogonalityReport<Real> gram_matrix(const FamilyParameters<Real>&,                   \
                                                 const WeightTable<Real>&, std::size_t,           \
                                                 const QContext<Real>&);                          \
  template VerificationResult<Real> verify_family(const FamilyParameters<Real>&,                  \
                                                  const QContext<Real>&, const VerifyOptions&);

QASKEY_INSTANTIATE(double)
QASKEY_INSTANTIATE(BigReal)

}  // namespace qaskey
