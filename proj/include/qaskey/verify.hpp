#ifndef QASKEY_VERIFY_HPP
#define QASKEY_VERIFY_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "qaskey/connection.hpp"
#include "qaskey/weights.hpp"

namespace qaskey {

template <RealScalar Real>
struct OrthogonalityReport {
  std::size_t nmax = 0;
  std::size_t node_count_used = 0;
  /// G_{nm} = sum_k u_n(x_k) u_m(x_k) r_k
  std::vector<std::vector<Real>> gram;
  std::vector<Real> K;
  /// sum_k u_n(x_k)^2 |r_k|, the size of the terms that cancel into K_n
  std::vector<Real> diagonal_mass;
  /// max_{n != m} |G_{nm}| / sqrt|K_n K_m|
  Real max_offdiag_residual{0};
  std::vector<Real> moment_residuals;
  bool favard_ok = true;
  /// |K_n - alpha_n K_{n-1}| / |K_n| for 1 <= n <= nmax; entry 0 is 0.
  std::vector<Real> norm_ratio_defects;
  /// max_{n,m} sum_k |u_n u_m r_k| / sqrt|K_n K_m|: how much cancellation
  /// the Gram entries need.
  Real condition{0};
  /// Coefficients behind the norm-ratio defects.
  RecurrenceCoefficients<Real> recurrence;
};

/// |sum_j v_k(x_j) r_j - m_k| / max(|m_k|, guard) for 0 <= k <= kmax.
template <RealScalar Real>
std::vector<Real> moment_reconstruction(const WeightTable<Real>& table, const SequenceSet<Real>& seq,
                                        std::size_t kmax, const QContext<Real>& ctx);

/// Number of leading nodes whose contributions to polynomials of degree
/// `degree` are needed: finite tables use their N + 1 nodes, infinite ones
/// stop once 5 consecutive |r_k| max(1, |x_k|)^degree fall below
/// tol * scale(k). Throws InsufficientNodes otherwise.
template <RealScalar Real, typename ScaleAt>
std::size_t truncation_length(const WeightTable<Real>& table, std::size_t degree,
                              const QContext<Real>& ctx, ScaleAt&& scale_at) {
  using std::abs;
  if (table.finite) {
    if (table.weights.size() < table.finite_node_count) {
      throw Error(ErrorKind::InsufficientNodes, "finite family needs all of its nodes");
    }
    return table.finite_node_count;
  }
  int quiet = 0;
  for (std::size_t k = 0; k < table.weights.size(); ++k) {
    const Real base = abs(table.nodes[k]) > 1 ? Real(abs(table.nodes[k])) : Real(1);
    // an underflowed weight against an overflowed power would give 0 * inf
    const Real bound = table.weights[k] == 0
                           ? Real(0)
                           : Real(abs(table.weights[k]) * ipow(base, static_cast<std::int64_t>(degree)));
    if (bound < ctx.tol() * scale_at(k)) {
      if (++quiet >= 5) return k + 1;
    } else {
      quiet = 0;
    }
  }
  throw Error(ErrorKind::InsufficientNodes,
              "node tail not below tolerance within " + std::to_string(table.weights.size()) +
                  " nodes");
}

/// Gram matrix and diagnostics without the degeneracy test on K_n.
template <RealScalar Real>
OrthogonalityReport<Real> assemble_gram(const FamilyParameters<Real>& params,
                                        const WeightTable<Real>& table, std::size_t nmax,
                                        const QContext<Real>& ctx);

/// Throws DegenerateNorm when some |K_n| < 1e3 tol sum_k u_n(x_k)^2 |r_k|,
/// i.e. when K_n is indistinguishable from cancellation noise.
template <RealScalar Real>
void check_norms(const OrthogonalityReport<Real>& report, const QContext<Real>& ctx);

template <RealScalar Real>
OrthogonalityReport<Real> gram_matrix(const FamilyParameters<Real>& params,
                                      const WeightTable<Real>& table, std::size_t nmax,
                                      const QContext<Real>& ctx);

struct VerifyOptions {
  std::size_t nmax = 8;
  std::size_t initial_nodes = 64;
  std::size_t max_nodes = 1024;
  std::size_t moment_kmax = 10;
  std::optional<std::size_t> termination_index;
};

template <RealScalar Real>
struct VerificationResult {
  OrthogonalityReport<Real> report;
  WeightTable<Real> table;
  /// sum of the weights used
  Real weight_sum{0};
};

/// Weights, moments and Gram matrix with the node count doubled until the
/// truncation criterion holds (up to max_nodes).
template <RealScalar Real>
VerificationResult<Real> verify_family(const FamilyParameters<Real>& params,
                                       const QContext<Real>& ctx, const VerifyOptions& options);

}  // namespace qaskey

#endif  // QASKEY_VERIFY_HPP
