#include <doctest.h>

#include <algorithm>

#include "qaskey/presets.hpp"
#include "qaskey/verify.hpp"
#include "test_support.hpp"

using namespace qaskey;
using qaskey::test::rel;
using qaskey::test::to_real;

namespace {

template <RealScalar Real>
PresetFamily<Real> preset(const std::string& name, const std::vector<double>& args,
                          const QContext<Real>& ctx) {
  return instantiate<Real>(name, to_real<Real>(args), ctx);
}

template <RealScalar Real>
Real largest(const std::vector<Real>& v) {
  return v.empty() ? Real(0) : *std::max_element(v.begin(), v.end());
}

}  // namespace

TEST_CASE("positive measure: little q-Jacobi on q^k") {
  for (double q : {0.3, 0.5, 0.7}) {
    CAPTURE(q);
    const QContext<double> ctx(q);
    const auto family = preset<double>("little_q_jacobi_v2", {0.3, 0.6}, ctx);
    VerifyOptions options;
    const auto result = verify_family(family.params, ctx, options);
    const auto& r = result.report;
    CHECK(r.nmax == 8);
    CHECK(r.gram.size() == 9);
    CHECK(r.max_offdiag_residual <= 1e-12);
    CHECK(largest(r.norm_ratio_defects) <= 1e-12);
    CHECK(largest(r.moment_residuals) <= 1e-12);
    CHECK(r.moment_residuals.size() == 11);
    CHECK(rel(result.weight_sum, 1.0) <= 1e-13);
    CHECK(r.condition == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.favard_ok);
    CHECK(r.K[0] == doctest::Approx(result.weight_sum));
    double product = 1;
    for (std::size_t n = 1; n <= 8; ++n) {
      product *= r.recurrence.alpha[n];
      CHECK(rel(r.K[n], product) < 1e-11);
    }
  }
}

TEST_CASE("finite family uses exactly N + 1 nodes") {
  for (int n : {5, 8, 10}) {
    CAPTURE(n);
    const QContext<double> ctx(0.5);
    const auto family = preset<double>("dual_q_hahn_v1", {0.3, 0.4, double(n)}, ctx);
    VerifyOptions options;
    options.nmax = static_cast<std::size_t>(n);
    options.termination_index = family.finite_n;
    const auto result = verify_family(family.params, ctx, options);
    CHECK(result.report.node_count_used == static_cast<std::size_t>(n) + 1);
    CHECK(result.report.max_offdiag_residual <= 1e-13);
    CHECK(result.report.moment_residuals.size() == static_cast<std::size_t>(std::min(n, 10)) + 1);
    CHECK(rel(result.weight_sum, 1.0) <= 1e-13);
  }
}

TEST_CASE("node budget grows until the tail is negligible") {
  const QContext<double> ctx(0.7);
  const auto family = preset<double>("little_q_jacobi_v2", {0.3, 0.6}, ctx);
  VerifyOptions options;
  options.initial_nodes = 8;
  const auto result = verify_family(family.params, ctx, options);
  CHECK(result.report.node_count_used > 8);
  CHECK(result.table.weights.size() >= result.report.node_count_used);

  options.max_nodes = 8;
  try {
    verify_family(family.params, ctx, options);
    FAIL("expected InsufficientNodes");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientNodes);
  }
}

TEST_CASE("truncation length") {
  WeightTable<double> table;
  table.nodes = {1, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  table.weights = {1, 1e-3, 1e-30, 1e-31, 1e-32, 1e-33, 1e-34, 1e-35};
  const QContext<double> ctx(0.5);
  CHECK(truncation_length(table, 4, ctx, [](std::size_t) { return 1.0; }) == 7);
  CHECK_THROWS_AS(truncation_length(table, 4, ctx, [](std::size_t) { return 1e-20; }), Error);
  table.finite = true;
  table.finite_node_count = 3;
  CHECK(truncation_length(table, 4, ctx, [](std::size_t) { return 1.0; }) == 3);
  table.finite_node_count = 20;
  CHECK_THROWS_AS(truncation_length(table, 4, ctx, [](std::size_t) { return 1.0; }), Error);
}

TEST_CASE("q-Laguerre reaches the double-mode tolerance") {
  const QContext<double> ctx(0.5);
  const auto family = preset<double>("q_laguerre", {-0.5}, ctx);
  const auto result = verify_family(family.params, ctx, VerifyOptions{});
  CHECK(result.report.max_offdiag_residual <= 1e-8);
  CHECK(largest(result.report.moment_residuals) <= 1e-10);
  CHECK(std::abs(result.weight_sum - 1) <= 1e-10);
}

TEST_CASE("signed measures report their cancellation") {
  // weights alternate in sign and the Gram entries cancel by many orders
  const QContext<double> ctx(0.5);
  const auto family = preset<double>("askey_wilson", {0.3, 0.2, 0.1, 0.4}, ctx);
  const auto form = contracting_form(family.params, ctx);
  const auto table = family_weight_table(form.params, 80, form.ctx);
  const auto report = assemble_gram(form.params, table, 8, form.ctx);
  CHECK(report.condition > 1e10);
  CHECK(std::any_of(table.weights.begin(), table.weights.end(), [](double r) { return r < 0; }));
}

TEST_CASE("degenerate norms") {
  OrthogonalityReport<double> report;
  report.K = {1.0, 1e-30};
  report.diagonal_mass = {1.0, 1.0};
  const QContext<double> ctx(0.5);
  try {
    check_norms(report, ctx);
    FAIL("expected DegenerateNorm");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateNorm);
  }
  report.K[1] = 1e-3;
  CHECK_NOTHROW(check_norms(report, ctx));
}

TEST_CASE("moment reconstruction") {
  const QContext<double> ctx(0.5);
  const auto family = preset<double>("little_q_jacobi_v2", {0.3, 0.6}, ctx);
  const auto table = family_weight_table(family.params, 60, ctx);
  const auto seq = build_sequences(family.params, 4, ctx);
  const auto residuals = moment_reconstruction(table, seq, 10, ctx);
  REQUIRE(residuals.size() == 11);
  for (double r : residuals) CHECK(r <= 1e-13);
}

TEST_CASE("extended precision Gram") {
  ScopedPrecision digits(50);
  const QContext<BigReal> ctx{BigReal("0.5")};
  const auto family = preset<BigReal>("little_q_jacobi_v2", {0.3, 0.6}, ctx);
  VerifyOptions options;
  options.nmax = 10;
  const auto result = verify_family(family.params, ctx, options);
  CHECK(result.report.max_offdiag_residual <= BigReal("1e-40"));
  CHECK(largest(result.report.norm_ratio_defects) <= BigReal("1e-40"));
}
