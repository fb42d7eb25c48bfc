#include "qaskey/presets.hpp"

#include <algorithm>

#include "qaskey/reparam.hpp"

namespace qaskey {

namespace {

const PresetArgument kScale{"scale", "nonzero", "1"};

std::vector<PresetDescriptor> build_catalog() {
  const PresetArgument gamma{"gamma", "nonzero", std::nullopt};
  const PresetArgument delta{"delta", "nonzero", std::nullopt};
  const PresetArgument big_n{"N", "integer >= 1", std::nullopt};
  return {
      {"askey_wilson",
       {{"a", "nonzero", std::nullopt},
        {"b", "nonzero", std::nullopt},
        {"c", "nonzero", std::nullopt},
        {"d", "nonzero", std::nullopt},
        kScale},
       "",
       "Koekoek-Lesky-Swarttouw 14.1"},
      {"continuous_big_q_hermite", {{"a", "nonzero", std::nullopt}, kScale}, "",
       "Koekoek-Lesky-Swarttouw 14.18"},
      {"discrete_q_hermite_1", {kScale}, "", "Koekoek-Lesky-Swarttouw 14.28"},
      {"little_q_jacobi_v1",
       {{"a", "nonzero", std::nullopt}, {"b", "nonzero", std::nullopt}, kScale},
       "",
       "Koekoek-Lesky-Swarttouw 14.12"},
      {"little_q_jacobi_v2",
       {{"a", "nonzero", std::nullopt}, {"b", "nonzero", std::nullopt}, kScale},
       "",
       "Koekoek-Lesky-Swarttouw 14.12"},
      {"q_laguerre",
       {{"alpha", "real; q > 0", std::nullopt}, {"b0", "real", "0"}, kScale},
       "",
       "Koekoek-Lesky-Swarttouw 14.21"},
      {"dual_q_hahn_v1", {gamma, delta, big_n, kScale}, "N", "Koekoek-Lesky-Swarttouw 14.7"},
      {"dual_q_hahn_v2", {gamma, delta, big_n, kScale}, "", "Koekoek-Lesky-Swarttouw 14.7"},
      {"dual_q_hahn_v3", {gamma, delta, big_n, kScale}, "N", "Koekoek-Lesky-Swarttouw 14.7"},
  };
}

template <RealScalar Real>
void require_nonzero(const Real& value, std::string_view preset, std::string_view arg) {
  if (value == 0) {
    throw Error(ErrorKind::ConstraintViolation,
                std::string(preset) + ": " + std::string(arg) + " must be nonzero");
  }
}

template <RealScalar Real>
std::size_t require_count(const Real& value, std::string_view preset) {
  using std::floor;
  if (!(value >= 1) || floor(value) != value || value > 100000) {
    throw Error(ErrorKind::ConstraintViolation, std::string(preset) + ": N must be an integer >= 1");
  }
  return static_cast<std::size_t>(to_double(value));
}

}  // namespace

std::size_t PresetDescriptor::required_args() const {
  return static_cast<std::size_t>(std::count_if(
      args.begin(), args.end(), [](const PresetArgument& a) { return !a.default_value; }));
}

const std::vector<PresetDescriptor>& list_presets() {
  static const std::vector<PresetDescriptor> catalog = build_catalog();
  return catalog;
}

const PresetDescriptor& find_preset(std::string_view name) {
  for (const auto& descriptor : list_presets()) {
    if (descriptor.name == name) return descriptor;
  }
  throw Error(ErrorKind::UnknownPreset, "no preset named '" + std::string(name) + "'");
}

template <RealScalar Real>
PresetFamily<Real> instantiate(std::string_view name, const std::vector<Real>& args,
                               const QContext<Real>& ctx) {
  const PresetDescriptor& descriptor = find_preset(name);
  if (args.size() < descriptor.required_args() || args.size() > descriptor.args.size()) {
    throw Error(ErrorKind::InvalidArgument,
                descriptor.name + " takes " + std::to_string(descriptor.required_args()) + " to " +
                    std::to_string(descriptor.args.size()) + " arguments, got " +
                    std::to_string(args.size()));
  }
  std::vector<Real> full = args;
  for (std::size_t i = args.size(); i < descriptor.args.size(); ++i) {
    full.push_back(parse_real<Real>(*descriptor.args[i].default_value));
  }
  const Real& q = ctx.q();
  const Real& A = full.back();
  require_nonzero(A, name, "scale");
  for (std::size_t i = 0; i < descriptor.args.size(); ++i) {
    if (descriptor.args[i].constraint == "nonzero") {
      require_nonzero(full[i], name, descriptor.args[i].name);
    }
  }

  PresetFamily<Real> out;
  FamilyParameters<Real>& P = out.params;
  if (name == "askey_wilson") {
    const Real &a = full[0], &b = full[1], &c = full[2], &d = full[3];
    CanonicalParameters<Real> canonical;
    canonical.family_case = FamilyCase::Generic;
    canonical.z1 = a * b * c * d;
    canonical.z2 = q * a * a;
    canonical.e1 = a * (b + c + d);
    canonical.e2 = a * a * (b * c + b * d + c * d);
    canonical.e3 = canonical.z1 * canonical.z2 / q;
    canonical.b2 = 1 / (2 * a);
    canonical.b1 = canonical.z2 * canonical.b2 / q;
    P = expand(canonical, ctx, A);
  } else if (name == "continuous_big_q_hermite") {
    const Real& a = full[0];
    P = {Real(0), A, Real(0), Real(a / 2), Real(1 / (2 * a)), Real(A * a / (2 * q)), Real(0)};
  } else if (name == "discrete_q_hermite_1") {
    P = {Real(0), A, Real(0), Real(1), Real(0), Real(A / q), A};
  } else if (name == "little_q_jacobi_v1") {
    const Real &a = full[0], &b = full[1];
    P = {Real(a * b * q * A), A, Real(0), Real(0), Real(1 / (q * b)), Real(0), Real((q * a - 1) * A)};
  } else if (name == "little_q_jacobi_v2") {
    const Real &a = full[0], &b = full[1];
    P = {Real(a * b * q * A), A, Real(0), Real(1), Real(0), Real(-(q * a - 1) * A / q), Real(0)};
  } else if (name == "q_laguerre") {
    using std::pow;
    if (!(q > 0)) {
      throw Error(ErrorKind::ConstraintViolation, "q_laguerre: q^(-alpha) needs q > 0");
    }
    const Real q_alpha = pow(q, Real(-full[0]));
    P = {A, Real(0), full[1], Real(0), Real(-1), Real(0), Real(A * (q_alpha - q))};
  } else {
    const Real &gamma = full[0], &delta = full[1];
    const std::size_t n = require_count(full[2], name);
    const Real q_n = ipow(q, static_cast<std::int64_t>(n));
    const Real q_minus_n = 1 / q_n;
    if (name == "dual_q_hahn_v1") {
      P = {Real(0), A, Real(0), q_minus_n, Real(q * gamma * delta * q_n),
           Real(A * q_minus_n * (1 / q - gamma)), Real(-q * A * gamma * (1 + delta))};
      out.finite_n = n;
    } else if (name == "dual_q_hahn_v2") {
      P = {Real(0), A, Real(0), Real(q * gamma), delta, Real(A * gamma * (1 - q_minus_n)),
           Real(-A * (gamma * delta * q + q_minus_n))};
    } else {
      P = {Real(0), A, Real(0), Real(gamma * delta * q), Real(1),
           Real(A * gamma * (delta - q_minus_n)), Real(-A * (gamma * q + q_minus_n))};
      out.finite_n = n;
    }
  }
  return out;
}

template PresetFamily<double> instantiate(std::string_view, const std::vector<double>&,
                                          const QContext<double>&);
template PresetFamily<BigReal> instantiate(std::string_view, const std::vector<BigReal>&,
                                           const QContext<BigReal>&);

}  // namespace qaskey
