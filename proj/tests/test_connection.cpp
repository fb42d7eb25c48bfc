#include <doctest.h>

#include <random>

#include "qaskey/connection.hpp"
#include "qaskey/presets.hpp"
#include "test_support.hpp"

using namespace qaskey;
using qaskey::test::rel;
using qaskey::test::sample_presets;
using qaskey::test::to_real;

namespace {

template <RealScalar Real>
FamilyParameters<Real> preset(const std::string& name, const std::vector<double>& args,
                              const QContext<Real>& ctx) {
  return instantiate<Real>(name, to_real<Real>(args), ctx).params;
}

}  // namespace

TEST_CASE("route names") {
  for (auto r : {RecurrenceRoute::Direct, RecurrenceRoute::AbsForm, RecurrenceRoute::YzForm}) {
    CHECK(parse_route(to_string(r)) == r);
  }
  CHECK(to_string(RecurrenceRoute::AbsForm) == "abs-form");
  CHECK_FALSE(parse_route("closed").has_value());
}

TEST_CASE("connection matrices are mutually inverse") {
  const QContext<double> ctx(0.5);
  for (const auto& call : sample_presets()) {
    CAPTURE(call.name);
    const auto params = preset<double>(call.name, call.args, ctx);
    const auto seq = build_sequences(params, 12, ctx, SequenceRequirement::RecurrenceOnly);
    const auto cm = connection_matrices(seq, 12, ctx);
    REQUIRE(cm.size == 12);
    for (std::size_t n = 0; n < 12; ++n) {
      CHECK(cm.c[n][n] == 1.0);
      CHECK(cm.chat[n][n] == 1.0);
      for (std::size_t m = 0; m <= n; ++m) {
        double sum = 0;
        double mass = 0;
        for (std::size_t k = m; k <= n; ++k) {
          sum += cm.c[n][k] * cm.chat[k][m];
          mass += std::abs(cm.c[n][k] * cm.chat[k][m]);
        }
        CHECK(std::abs(sum - (n == m ? 1.0 : 0.0)) <= 1e-12 * mass);
      }
      // the functional annihilates u_n for n >= 1
      if (n == 0) continue;
      double sum = 0;
      double mass = 0;
      for (std::size_t k = 0; k <= n; ++k) {
        sum += cm.c[n][k] * cm.moments[k];
        mass += std::abs(cm.c[n][k] * cm.moments[k]);
      }
      CHECK(std::abs(sum) <= 1e-12 * mass);
    }
    CHECK(cm.moments[0] == 1.0);
  }
}

TEST_CASE("coincident eigenvalues are rejected") {
  const QContext<double> ctx(0.5);
  FamilyParameters<double> p{0.7, 0.7 * 0.125, 0.2, -0.4, 0.9, 0.35, -1.1};
  const auto seq = build_sequences(p, 6, ctx);
  try {
    connection_matrices(seq, 5, ctx);
    FAIL("expected CoincidentEigenvalues");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CoincidentEigenvalues);
  }
}

TEST_CASE("closed-form entries match the accumulated matrix") {
  const QContext<double> ctx(0.5);
  const auto params = preset<double>("askey_wilson", {0.3, 0.2, 0.1, 0.4}, ctx);
  const auto c = canonicalize(params, ctx);
  const auto seq = build_sequences(params, 10, ctx);
  const auto cm = connection_matrices(seq, 10, ctx);
  for (std::size_t n = 0; n < 10; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      CHECK(rel(connection_entry_yz(c, n, k, ctx), cm.c[n][k]) < 1e-12);
    }
  }
  CHECK_THROWS_AS(connection_entry_yz(c, 2, 3, ctx), Error);
}

// Monic Askey-Wilson recurrence in x = (a q^k + q^-k / a) / 2 from the
// standard hypergeometric normalisation; tests/oracles/generate.py.
TEST_CASE("Askey-Wilson recurrence against the textbook closed form") {
  ScopedPrecision digits(50);
  const QContext<BigReal> ctx(BigReal("0.5"));
  const std::vector<BigReal> args{BigReal("0.3"), BigReal("0.2"), BigReal("0.1"), BigReal("0.4")};
  const auto params = instantiate<BigReal>("askey_wilson", args, ctx).params;
  const char* alpha[] = {"0.08733453142641272529654863", "0.156891392714751087357367",
                         "0.2001440141707158418853381",  "0.2241971973842474226734756",
                         "0.2368734028098353110562359",  "0.2433795698248321695256199"};
  const char* beta[] = {"0.4761427425821972734562951",  "0.2555462708258475534398426",
                        "0.1325031154112780715386275",  "0.06748343401428336179999359",
                        "0.03405614715117484708812235", "0.01710750760713512373078538",
                        "0.00857371682972503162676082"};
  for (auto route : {RecurrenceRoute::Direct, RecurrenceRoute::AbsForm, RecurrenceRoute::YzForm}) {
    CAPTURE(to_string(route));
    const auto rec = recurrence_coefficients(params, 6, route, ctx);
    CHECK(rec.route == route);
    CHECK(rec.alpha[0] == 0);
    for (std::size_t n = 1; n <= 6; ++n) CHECK(qaskey::test::rel_str(rec.alpha[n], alpha[n - 1]) < 1e-24);
    for (std::size_t n = 0; n <= 6; ++n) CHECK(qaskey::test::rel_str(rec.beta[n], beta[n]) < 1e-24);
  }
}

// Dual q-Hahn in mu(x) = q^-x + gamma delta q^(x+1): alpha_n = A_{n-1} C_n,
// beta_n = 1 + gamma delta q - A_n - C_n.
TEST_CASE("dual q-Hahn recurrence against the textbook closed form") {
  const QContext<double> ctx(0.5);
  const double alpha[] = {62.4495, 24.350625, 6.72065625, 1.4902734375, 0.2303203125};
  const double beta[] = {27.41, 17.305, 9.5525, 5.00125, 2.556875, 1.2925};
  for (const char* variant : {"dual_q_hahn_v1", "dual_q_hahn_v2", "dual_q_hahn_v3"}) {
    CAPTURE(variant);
    const auto params = preset<double>(variant, {0.3, 0.4, 5}, ctx);
    const auto rec = recurrence_coefficients(params, 5, RecurrenceRoute::AbsForm, ctx);
    for (std::size_t n = 1; n <= 5; ++n) CHECK(rel(rec.alpha[n], alpha[n - 1]) < 1e-12);
    for (std::size_t n = 0; n <= 5; ++n) CHECK(rel(rec.beta[n], beta[n]) < 1e-12);
  }
}

TEST_CASE("q-Hermite closed forms on every route") {
  ScopedPrecision digits(50);
  for (const char* qs : {"0.3", "0.5", "0.7"}) {
    const BigReal q(qs);
    const QContext<BigReal> ctx(q);
    const BigReal a("0.4");
    const auto big = instantiate<BigReal>("continuous_big_q_hermite", {a}, ctx).params;
    const auto discrete = instantiate<BigReal>("discrete_q_hermite_1", {}, ctx).params;
    for (auto route : {RecurrenceRoute::Direct, RecurrenceRoute::AbsForm, RecurrenceRoute::YzForm}) {
      const auto rb = recurrence_coefficients(big, 20, route, ctx);
      const auto rd = recurrence_coefficients(discrete, 20, route, ctx);
      for (std::size_t n = 0; n <= 20; ++n) {
        const BigReal qn = ipow(q, static_cast<std::int64_t>(n));
        // the direct route cancels down from q^-n to q^n: 1e-21 of the
        // 50 digits are gone at q = 0.3, n = 20
        CHECK(rel(rb.beta[n], BigReal(a * qn / 2)) < 1e-25);
        CHECK(abs(rd.beta[n]) < 1e-25);
        if (n == 0) continue;
        CHECK(rel(rb.alpha[n], BigReal((1 - qn) / 4)) < 1e-25);
        CHECK(rel(rd.alpha[n], BigReal(qn / q * (1 - qn))) < 1e-25);
      }
    }
  }
}

TEST_CASE("property: abs-form p2 equals its defining relation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double q = std::uniform_real_distribution<double>(0.2, 0.9)(rng);
    FamilyParameters<double> p;
    for (double* f : {&p.a1, &p.a2, &p.b0, &p.b1, &p.b2, &p.s1, &p.s2}) {
      *f = qaskey::test::signed_uniform(rng);
    }
    const double x = qaskey::test::signed_uniform(rng, 0.1, 3.0);
    const double direct = abs_form_p2(p, x, q);
    const double defined = abs_form_p2_from_p1(p, x, q);
    CHECK(std::abs(direct - defined) <= 1e-12 * std::max({std::abs(direct), std::abs(defined), 1.0}));
  }
}

TEST_CASE("property: the three routes agree on every preset") {
  ScopedPrecision digits(50);
  for (const char* qs : {"0.3", "0.7"}) {
    const QContext<BigReal> ctx{BigReal(qs)};
    for (const auto& call : sample_presets()) {
      CAPTURE(call.name);
      const auto params = preset<BigReal>(call.name, call.args, ctx);
      const auto d = recurrence_coefficients(params, 10, RecurrenceRoute::Direct, ctx);
      const auto a = recurrence_coefficients(params, 10, RecurrenceRoute::AbsForm, ctx);
      const auto y = recurrence_coefficients(params, 10, RecurrenceRoute::YzForm, ctx);
      for (std::size_t n = 0; n <= 9; ++n) {
        // beta_n can vanish; compare it on the scale of the Jacobi row
        const BigReal scale = abs(d.beta[n]) + sqrt(abs(d.alpha[n])) + sqrt(abs(d.alpha[n + 1]));
        CHECK(to_double(BigReal(abs(a.beta[n] - d.beta[n]) / scale)) < 1e-25);
        CHECK(to_double(BigReal(abs(y.beta[n] - d.beta[n]) / scale)) < 1e-25);
        if (n == 0) continue;
        CHECK(rel(a.alpha[n], d.alpha[n]) < 1e-25);
        CHECK(rel(y.alpha[n], d.alpha[n]) < 1e-25);
      }
    }
  }
}

TEST_CASE("polynomial evaluation") {
  const QContext<double> ctx(0.5);
  const auto params = preset<double>("askey_wilson", {0.3, 0.2, 0.1, 0.4}, ctx);
  const auto rec = recurrence_coefficients(params, 6, RecurrenceRoute::AbsForm, ctx);
  const auto u = polynomial_sweep(rec, 6, 0.37);
  CHECK(u[0] == 1.0);
  CHECK(rel(u[1], 0.37 - rec.beta[0]) < 1e-15);

  // Newton form against the sweep, where neither cancels
  ScopedPrecision digits(50);
  const QContext<BigReal> big{BigReal("0.5")};
  const auto wide = preset<BigReal>("askey_wilson", {0.3, 0.2, 0.1, 0.4}, big);
  const BigReal t("0.37");
  for (std::size_t n = 0; n <= 6; ++n) {
    const BigReal newton = polynomial_values(wide, n, t, PolynomialMethod::Newton, big);
    const BigReal sweep = polynomial_values(wide, n, t, PolynomialMethod::Recurrence, big);
    CHECK(rel(sweep, newton) < 1e-35);
    CHECK(std::abs(u[n] - to_double(newton)) <= 1e-14 * std::max(std::abs(u[n]), 1.0));
  }
}

TEST_CASE("eigen-equation residuals") {
  const QContext<double> ctx(0.5);
  for (const auto& call : sample_presets()) {
    CAPTURE(call.name);
    const auto params = preset<double>(call.name, call.args, ctx);
    for (std::size_t n = 0; n <= 12; ++n) {
      const auto r = eigen_residual(params, n, ctx);
      CHECK(r.n == n);
      CHECK(r.residual <= 1e-12);
    }
  }
}
