#ifndef QASKEY_LATTICE_HPP
#define QASKEY_LATTICE_HPP

#include <cstddef>
#include <string_view>
#include <vector>

#include "qaskey/qnum.hpp"

namespace qaskey {

/// The seven-parameter vector (a1, a2, b0, b1, b2, s1, s2). a0 = 0 and
/// s0 = -s1 - s2 are implied; the base q travels with the QContext.
template <RealScalar Real>
struct FamilyParameters {
  Real a1{0};
  Real a2{0};
  Real b0{0};
  Real b1{0};
  Real b2{0};
  Real s1{0};
  Real s2{0};

  bool operator==(const FamilyParameters&) const = default;
};

/// What build_sequences insists on. Recurrence-only tables (for vectors with
/// b1 = b2 = 0) only need a nonzero a-pair.
enum class SequenceRequirement { Nodes, RecurrenceOnly };

/// Tables of x_k, h_k, d_k, g_k for 0 <= k <= max_index.
template <RealScalar Real>
class SequenceSet {
 public:
  SequenceSet(const FamilyParameters<Real>& params, std::size_t max_index,
              const QContext<Real>& ctx);

  [[nodiscard]] const FamilyParameters<Real>& params() const { return params_; }
  [[nodiscard]] const Real& q() const { return q_; }
  [[nodiscard]] std::size_t max_index() const { return x_.size() - 1; }

  [[nodiscard]] const Real& x(std::size_t k) const { return at(x_, k); }
  [[nodiscard]] const Real& h(std::size_t k) const { return at(h_, k); }
  [[nodiscard]] const Real& d(std::size_t k) const { return at(d_, k); }
  [[nodiscard]] const Real& g(std::size_t k) const { return at(g_, k); }

  /// A new table set reaching at least `max_index` (grown by doubling).
  [[nodiscard]] SequenceSet extended(std::size_t max_index) const;

 private:
  const Real& at(const std::vector<Real>& table, std::size_t k) const;

  FamilyParameters<Real> params_;
  Real q_;
  Real tol_;
  std::size_t max_terms_;
  std::vector<Real> x_, h_, d_, g_;
};

template <RealScalar Real>
SequenceSet<Real> build_sequences(const FamilyParameters<Real>& params, std::size_t max_index,
                                  const QContext<Real>& ctx,
                                  SequenceRequirement requirement = SequenceRequirement::Nodes);

/// v_n(t) = (t - x_0)(t - x_1)...(t - x_{n-1})
template <RealScalar Real>
Real newton_eval(const SequenceSet<Real>& seq, std::size_t n, const Real& t);

/// v'_{j+1}(x_k) = prod_{i <= j, i != k} (x_k - x_i)
template <RealScalar Real>
Real newton_node_derivative(const SequenceSet<Real>& seq, std::size_t j, std::size_t k);

enum class ViolationKind {
  APairZero,
  BPairZero,
  CoincidentH,
  CoincidentX,
  VanishingG,
  VanishingAlpha,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  /// Relative size of the offending quantity against its scale.
  double magnitude = 0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  [[nodiscard]] bool has(ViolationKind kind) const;
};

template <RealScalar Real>
ValidationReport validate_family(const FamilyParameters<Real>& params, std::size_t max_index,
                                 const QContext<Real>& ctx);

/// |a - b| <= 1e3 eps max(|a|, |b|), the distinctness threshold used
/// throughout.
template <RealScalar Real>
bool nearly_equal(const Real& a, const Real& b) {
  using std::abs;
  const Real scale = abs(a) > abs(b) ? abs(a) : abs(b);
  return abs(a - b) <= 1000 * machine_epsilon<Real>() * scale;
}

}  // namespace qaskey

#endif  // QASKEY_LATTICE_HPP
