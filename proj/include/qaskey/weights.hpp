#ifndef QASKEY_WEIGHTS_HPP
#define QASKEY_WEIGHTS_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "qaskey/lattice.hpp"
#include "qaskey/reparam.hpp"

namespace qaskey {

/// Coefficients rho(k, j) of the series f_k(t), j >= k >= 0.
/// With a termination index N, rho(k, j) = 0 for every j > N.
template <RealScalar Real>
struct RhoGenerator {
  CanonicalParameters<Real> canonical;
  std::optional<std::size_t> termination_index;
};

/// Uses `declared_termination` when given, otherwise looks for a numerator
/// factor that is exactly zero.
template <RealScalar Real>
RhoGenerator<Real> make_rho_generator(const CanonicalParameters<Real>& canonical,
                                      const QContext<Real>& ctx,
                                      std::optional<std::size_t> declared_termination = {});

/// mu(0) = 1; for k >= 1
/// (-1)^k q^{k(k-1)/2} / (q;q)_k * (1 - q^{2k-1} z2) / (1 - q^{k-1} z2)
template <RealScalar Real>
Real mu(const CanonicalParameters<Real>& canonical, std::size_t k, const QContext<Real>& ctx);

template <RealScalar Real>
Real rho(const RhoGenerator<Real>& gen, std::size_t k, std::size_t j, const QContext<Real>& ctx);

/// m_j / v'_{j+1}(x_k), straight from the moments and the nodes.
template <RealScalar Real>
Real rho_raw(const SequenceSet<Real>& seq, const std::vector<Real>& moments, std::size_t k,
             std::size_t j);

/// r_k = f_k(1) = sum_{j >= k} rho(k, j); value carries r_k.
template <RealScalar Real>
SeriesResult<Real> weight(const RhoGenerator<Real>& gen, std::size_t k, const QContext<Real>& ctx);

template <RealScalar Real>
struct WeightTable {
  std::vector<Real> nodes;
  std::vector<Real> weights;
  std::vector<SeriesResult<Real>> diagnostics;
  bool finite = false;
  /// N + 1 for a finite family
  std::size_t finite_node_count = 0;
};

/// Entries 0 <= k <= last_index; `seq` must reach last_index.
template <RealScalar Real>
WeightTable<Real> weight_table(const RhoGenerator<Real>& gen, const SequenceSet<Real>& seq,
                               std::size_t last_index, const QContext<Real>& ctx);

/// Canonicalizes (after inverting q when |q| > 1) and tabulates the weights.
template <RealScalar Real>
WeightTable<Real> family_weight_table(const FamilyParameters<Real>& params, std::size_t last_index,
                                      const QContext<Real>& ctx,
                                      std::optional<std::size_t> declared_termination = {});

template <RealScalar Real>
struct CoefficientReport {
  /// max_j |sum_k rho(k, j)| / max_k |rho(k, j)|, 1 <= j <= jmax
  Real sum_rule{0};
  /// max relative gap between rho and its raw definition, j <= jmax
  Real raw_oracle{0};
  /// ratio identity rho(k+1, j) / rho(k, j), 0 <= k < j <= jmax
  std::optional<Real> ratio_identity;
  /// rho(k, j) = rho(0, j) [t^j] psi_k, 1 <= k <= j <= jmax
  std::optional<Real> hadamard;
};

template <RealScalar Real>
CoefficientReport<Real> coefficient_checks(const RhoGenerator<Real>& gen,
                                           const SequenceSet<Real>& seq, std::size_t jmax,
                                           const QContext<Real>& ctx);

/// The right side of rho(k+1, j) / rho(k, j) in closed form.
template <RealScalar Real>
Real rho_ratio_in_k(const CanonicalParameters<Real>& canonical, std::size_t k, std::size_t j,
                    const QContext<Real>& ctx);

/// rho(0, j) mu(k) (z2;q)_k (q^{j-k+1};q)_k / (q^j z2;q)_k
template <RealScalar Real>
Real rho_hadamard(const RhoGenerator<Real>& gen, std::size_t k, std::size_t j,
                  const QContext<Real>& ctx);

}  // namespace qaskey

#endif  // QASKEY_WEIGHTS_HPP
