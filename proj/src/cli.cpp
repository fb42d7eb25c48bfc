#include "qaskey/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <CLI11.hpp>

#include "qaskey/connection.hpp"
#include "qaskey/presets.hpp"
#include "qaskey/reparam.hpp"
#include "qaskey/verify.hpp"
#include "qaskey/weights.hpp"

namespace qaskey::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kSelectors = {"presets", "weights", "recurrence",
                                             "reparam", "verify",  "moments"};

constexpr int kDoubleDigits = 16;
constexpr double kMomentTolerance = 1e-10;
constexpr double kWeightSumTolerance = 1e-10;
constexpr double kNormRatioTolerance = 1e-9;

ordered_json nullable(const std::string& s) { return s.empty() ? ordered_json(nullptr) : ordered_json(s); }

std::string text_field(const json& doc, const char* key, const std::string& fallback) {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  if (!doc.at(key).is_string()) {
    throw std::invalid_argument(std::string("job field '") + key + "' must be a string");
  }
  return doc.at(key).get<std::string>();
}

template <typename Int>
Int count_field(const json& doc, const char* key, Int fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw std::invalid_argument(std::string("job field '") + key +
                                "' must be a non-negative integer");
  }
  return static_cast<Int>(v.get<long long>());
}

std::vector<std::string> string_list(const json& doc, const char* key) {
  std::vector<std::string> out;
  if (!doc.contains(key)) return out;
  if (!doc.at(key).is_array()) {
    throw std::invalid_argument(std::string("job field '") + key + "' must be an array");
  }
  for (const auto& v : doc.at(key)) {
    if (!v.is_string()) {
      throw std::invalid_argument(std::string("entries of '") + key + "' must be strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::InsufficientNodes:
      return kConvergenceFailure;
    case ErrorKind::DegenerateNorm:
      return kVerificationFailure;
    default:
      return kBadInput;
  }
}

/// An artifact and whether it reports a failed check.
struct Artifact {
  std::string body;
  std::string extension;
  int code = kOk;
};

std::string render(const ordered_json& doc) { return doc.dump(2) + "\n"; }

Artifact presets_artifact(const JobSpec& job) {
  Artifact a;
  if (job.format == "json") {
    ordered_json list = ordered_json::array();
    for (const auto& p : list_presets()) {
      ordered_json args = ordered_json::array();
      for (const auto& arg : p.args) {
        ordered_json e;
        e["name"] = arg.name;
        e["constraint"] = arg.constraint;
        e["default"] = arg.default_value ? ordered_json(*arg.default_value) : ordered_json(nullptr);
        args.push_back(e);
      }
      ordered_json e;
      e["name"] = p.name;
      e["args"] = args;
      e["finite_N"] = nullable(p.finite_n);
      e["citation"] = p.citation;
      list.push_back(e);
    }
    a.body = render(list);
    a.extension = "json";
    return a;
  }
  std::ostringstream os;
  os << "name,args,finite_N,citation\n";
  for (const auto& p : list_presets()) {
    std::vector<std::string> names;
    for (const auto& arg : p.args) {
      names.push_back(arg.default_value ? arg.name + "=" + *arg.default_value : arg.name);
    }
    os << p.name << ',' << join(names, ';') << ',' << p.finite_n << ',' << p.citation << '\n';
  }
  a.body = os.str();
  a.extension = "csv";
  return a;
}

template <RealScalar Real>
struct Family {
  FamilyParameters<Real> params;
  std::optional<std::size_t> finite_n;
};

template <RealScalar Real>
std::vector<Real> parse_list(const std::vector<std::string>& items) {
  std::vector<Real> out;
  out.reserve(items.size());
  for (const auto& s : items) out.push_back(parse_real<Real>(s));
  return out;
}

template <RealScalar Real>
Family<Real> resolve_family(const JobSpec& job, const QContext<Real>& ctx) {
  if (job.preset && !job.params.empty()) {
    throw std::invalid_argument("give either --preset or --params, not both");
  }
  if (job.preset) {
    const auto family = instantiate<Real>(*job.preset, parse_list<Real>(job.args), ctx);
    return {family.params, family.finite_n};
  }
  if (job.params.size() != 7) {
    throw std::invalid_argument("--params needs exactly 7 values a1,a2,b0,b1,b2,s1,s2");
  }
  const auto v = parse_list<Real>(job.params);
  return {FamilyParameters<Real>{v[0], v[1], v[2], v[3], v[4], v[5], v[6]}, std::nullopt};
}

template <RealScalar Real>
Artifact weights_artifact(const JobSpec& job, const QContext<Real>& ctx) {
  const auto family = resolve_family(job, ctx);
  const auto table = family_weight_table(family.params, job.nodes, ctx, family.finite_n);
  Artifact a;
  if (job.format == "json") {
    ordered_json rows = ordered_json::array();
    for (std::size_t k = 0; k < table.weights.size(); ++k) {
      const auto& d = table.diagnostics[k];
      ordered_json row;
      row["k"] = k;
      row["x_k"] = to_decimal(table.nodes[k]);
      row["r_k"] = to_decimal(table.weights[k]);
      row["terms_used"] = d.terms_used;
      row["tail_bound"] = to_decimal(d.tail_bound);
      row["terminated"] = d.terminated;
      rows.push_back(row);
    }
    ordered_json doc;
    doc["finite"] = table.finite;
    doc["finite_node_count"] = table.finite_node_count;
    doc["rows"] = rows;
    a.body = render(doc);
    a.extension = "json";
    return a;
  }
  std::ostringstream os;
  os << "k,x_k,r_k,terms_used,tail_bound\n";
  for (std::size_t k = 0; k < table.weights.size(); ++k) {
    os << k << ',' << to_decimal(table.nodes[k]) << ',' << to_decimal(table.weights[k]) << ','
       << table.diagnostics[k].terms_used << ',' << to_decimal(table.diagnostics[k].tail_bound)
       << '\n';
  }
  a.body = os.str();
  a.extension = "csv";
  return a;
}

template <RealScalar Real>
Artifact recurrence_artifact(const JobSpec& job, const QContext<Real>& ctx) {
  const auto route = parse_route(job.route);
  if (!route) throw std::invalid_argument("unknown route '" + job.route + "'");
  const auto family = resolve_family(job, ctx);
  const auto rec = recurrence_coefficients(family.params, job.nmax, *route, ctx);
  Artifact a;
  if (job.format == "json") {
    ordered_json rows = ordered_json::array();
    for (std::size_t n = 0; n <= job.nmax; ++n) {
      ordered_json row;
      row["n"] = n;
      row["alpha_n"] = to_decimal(rec.alpha[n]);
      row["beta_n"] = to_decimal(rec.beta[n]);
      rows.push_back(row);
    }
    ordered_json doc;
    doc["route"] = std::string(to_string(rec.route));
    doc["rows"] = rows;
    a.body = render(doc);
    a.extension = "json";
    return a;
  }
  std::ostringstream os;
  os << "n,alpha_n,beta_n\n";
  for (std::size_t n = 0; n <= job.nmax; ++n) {
    os << n << ',' << to_decimal(rec.alpha[n]) << ',' << to_decimal(rec.beta[n]) << '\n';
  }
  a.body = os.str();
  a.extension = "csv";
  return a;
}

template <RealScalar Real>
Artifact reparam_artifact(const JobSpec& job, const QContext<Real>& ctx) {
  const auto family = resolve_family(job, ctx);
  const auto c = canonicalize(family.params, ctx);
  const std::vector<std::pair<std::string, std::string>> fields = {
      {"case", std::string(to_string(c.family_case))},
      {"e1", to_decimal(c.e1)},
      {"e2", to_decimal(c.e2)},
      {"e3", to_decimal(c.e3)},
      {"z1", to_decimal(c.z1)},
      {"z2", to_decimal(c.z2)},
      {"p", to_decimal(c.p)},
      {"b0", to_decimal(c.b0)},
      {"b1", to_decimal(c.b1)},
      {"b2", to_decimal(c.b2)},
  };
  Artifact a;
  if (job.format == "json") {
    ordered_json doc;
    for (const auto& [k, v] : fields) doc[k] = v;
    a.body = render(doc);
    a.extension = "json";
    return a;
  }
  std::ostringstream os;
  os << "field,value\n";
  for (const auto& [k, v] : fields) os << k << ',' << v << '\n';
  a.body = os.str();
  a.extension = "csv";
  return a;
}

template <RealScalar Real>
Artifact moments_artifact(const JobSpec& job, const QContext<Real>& ctx) {
  const auto family = resolve_family(job, ctx);
  const auto seq = build_sequences(family.params, job.nmax, ctx, SequenceRequirement::RecurrenceOnly);
  const auto m = moments(seq, job.nmax, ctx);
  Artifact a;
  if (job.format == "json") {
    ordered_json rows = ordered_json::array();
    for (std::size_t k = 0; k < m.size(); ++k) {
      ordered_json row;
      row["k"] = k;
      row["m_k"] = to_decimal(m[k]);
      rows.push_back(row);
    }
    a.body = render(rows);
    a.extension = "json";
    return a;
  }
  std::ostringstream os;
  os << "k,m_k\n";
  for (std::size_t k = 0; k < m.size(); ++k) os << k << ',' << to_decimal(m[k]) << '\n';
  a.body = os.str();
  a.extension = "csv";
  return a;
}

template <RealScalar Real>
ordered_json decimal_array(const std::vector<Real>& values) {
  ordered_json out = ordered_json::array();
  for (const auto& v : values) out.push_back(to_decimal(v));
  return out;
}

template <RealScalar Real>
Artifact verify_artifact(const JobSpec& job, const QContext<Real>& ctx) {
  using std::abs;
  const auto family = resolve_family(job, ctx);
  VerifyOptions options;
  options.nmax = job.nmax;
  options.initial_nodes = std::max<std::size_t>(job.nodes, 1);
  options.max_nodes = std::max(job.max_nodes, options.initial_nodes);
  options.termination_index = family.finite_n;
  const auto result = verify_family(family.params, ctx, options);
  const auto& r = result.report;

  Real gram_tol;
  if (!job.residual_tol.empty()) {
    gram_tol = parse_real<Real>(job.residual_tol);
  } else if constexpr (std::is_same_v<Real, double>) {
    gram_tol = 1e-8;
  } else {
    gram_tol = Real("1e-24");
  }
  const Real moment_max = r.moment_residuals.empty()
                              ? Real(0)
                              : *std::max_element(r.moment_residuals.begin(), r.moment_residuals.end());
  const Real ratio_max = r.norm_ratio_defects.empty()
                             ? Real(0)
                             : *std::max_element(r.norm_ratio_defects.begin(), r.norm_ratio_defects.end());
  const Real sum_defect = abs(Real(result.weight_sum - 1));
  const bool gram_ok = r.max_offdiag_residual <= gram_tol;
  const bool moments_ok = moment_max <= Real(kMomentTolerance);
  const bool sum_ok = sum_defect <= Real(kWeightSumTolerance);
  const bool ratio_ok = ratio_max <= Real(kNormRatioTolerance);

  ordered_json gram = ordered_json::array();
  for (const auto& row : r.gram) gram.push_back(decimal_array(row));
  ordered_json doc;
  doc["nmax"] = r.nmax;
  doc["node_count_used"] = r.node_count_used;
  doc["gram"] = gram;
  doc["K"] = decimal_array(r.K);
  doc["diagonal_mass"] = decimal_array(r.diagonal_mass);
  doc["max_offdiag_residual"] = to_decimal(r.max_offdiag_residual);
  doc["moment_residuals"] = decimal_array(r.moment_residuals);
  doc["favard_ok"] = r.favard_ok;
  doc["norm_ratio_defects"] = decimal_array(r.norm_ratio_defects);
  doc["condition"] = to_decimal(r.condition);
  doc["recurrence"] = {{"route", std::string(to_string(r.recurrence.route))},
                       {"alpha", decimal_array(r.recurrence.alpha)},
                       {"beta", decimal_array(r.recurrence.beta)}};
  doc["weight_sum"] = to_decimal(result.weight_sum);
  doc["tolerances"] = {{"offdiag", to_decimal(gram_tol)},
                       {"moments", to_decimal(Real(kMomentTolerance))},
                       {"weight_sum", to_decimal(Real(kWeightSumTolerance))},
                       {"norm_ratio", to_decimal(Real(kNormRatioTolerance))}};
  doc["checks"] = {{"offdiag", gram_ok},
                   {"moments", moments_ok},
                   {"weight_sum", sum_ok},
                   {"norm_ratio", ratio_ok}};
  const bool passed = gram_ok && moments_ok && sum_ok && ratio_ok;
  doc["passed"] = passed;

  Artifact a;
  a.body = render(doc);
  a.extension = "json";
  a.code = passed ? kOk : kVerificationFailure;
  return a;
}

template <RealScalar Real>
Artifact produce(const std::string& selector, const JobSpec& job) {
  if (selector == "presets") return presets_artifact(job);
  const Real q = parse_real<Real>(job.q);
  const Real tol = job.tol.empty() ? default_tolerance<Real>() : parse_real<Real>(job.tol);
  const QContext<Real> ctx(q, tol);
  if (selector == "weights") return weights_artifact(job, ctx);
  if (selector == "recurrence") return recurrence_artifact(job, ctx);
  if (selector == "reparam") return reparam_artifact(job, ctx);
  if (selector == "moments") return moments_artifact(job, ctx);
  if (selector == "verify") return verify_artifact(job, ctx);
  throw std::invalid_argument("unknown artifact selector '" + selector + "'");
}

Artifact produce_at_precision(const std::string& selector, const JobSpec& job) {
  if (job.precision < 1) throw std::invalid_argument("precision must be positive");
  if (job.format != "csv" && job.format != "json") {
    throw std::invalid_argument("format must be csv or json");
  }
  if (job.precision <= kDoubleDigits) return produce<double>(selector, job);
  ScopedPrecision guard(static_cast<unsigned>(job.precision));
  return produce<BigReal>(selector, job);
}

/// Runs one selector, reporting library errors on `err`.
Artifact guarded(const std::string& selector, const JobSpec& job, std::ostream& err) {
  try {
    return produce_at_precision(selector, job);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return {"", "", exit_code_for(e.kind())};
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return {"", "", kBadInput};
  }
}

JobSpec load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open job file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("job file '" + path + "': " + e.what());
  }
  return job_from_json(doc);
}

/// Flags bound to one subcommand; after parsing, the given ones override the
/// job file.
struct JobFlags {
  JobSpec values;
  std::string job_path;
  std::vector<std::pair<CLI::Option*, std::function<void(JobSpec&, const JobSpec&)>>> overrides;

  void attach(CLI::App& app) {
    auto bind = [&](CLI::Option* opt, auto member) {
      overrides.emplace_back(opt, [member](JobSpec& to, const JobSpec& from) {
        to.*member = from.*member;
      });
    };
    bind(app.add_option("--preset", preset_name, "preset family name"), &JobSpec::preset);
    bind(app.add_option("--args", values.args, "preset arguments, comma separated")->delimiter(','),
         &JobSpec::args);
    bind(app.add_option("--params", values.params, "raw vector a1,a2,b0,b1,b2,s1,s2")
             ->delimiter(','),
         &JobSpec::params);
    bind(app.add_option("--q", values.q, "base q"), &JobSpec::q);
    bind(app.add_option("--precision", values.precision, "decimal digits (<= 16: double)"),
         &JobSpec::precision);
    bind(app.add_option("--tol", values.tol, "series tolerance"), &JobSpec::tol);
    bind(app.add_option("--nmax", values.nmax, "largest degree"), &JobSpec::nmax);
    bind(app.add_option("--nodes", values.nodes, "last weight index / initial node count"),
         &JobSpec::nodes);
    bind(app.add_option("--max-nodes", values.max_nodes, "node budget for verify"),
         &JobSpec::max_nodes);
    bind(app.add_option("--route", values.route, "direct, abs-form or yz-form"), &JobSpec::route);
    bind(app.add_option("--format", values.format, "csv or json"), &JobSpec::format);
    bind(app.add_option("--residual-tol", values.residual_tol, "off-diagonal Gram tolerance"),
         &JobSpec::residual_tol);
    bind(app.add_option("--outputs", values.outputs, "artifact selectors for run")->delimiter(','),
         &JobSpec::outputs);
    app.add_option("--job", job_path, "JobSpec JSON file");
  }

  JobSpec merged() {
    if (!preset_name.empty()) values.preset = preset_name;
    JobSpec job = job_path.empty() ? JobSpec{} : load_job(job_path);
    for (auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(job, values);
    }
    return job;
  }

 private:
  std::string preset_name;
};

}  // namespace

ordered_json to_json(const JobSpec& job) {
  ordered_json family;
  if (job.preset) {
    family["preset"] = *job.preset;
    family["args"] = job.args;
  } else {
    family["params"] = job.params;
  }
  ordered_json doc;
  doc["family"] = family;
  doc["q"] = job.q;
  doc["precision"] = job.precision;
  doc["tol"] = nullable(job.tol);
  doc["nmax"] = job.nmax;
  doc["nodes"] = job.nodes;
  doc["max_nodes"] = job.max_nodes;
  doc["route"] = job.route;
  doc["format"] = job.format;
  doc["residual_tol"] = nullable(job.residual_tol);
  doc["outputs"] = job.outputs;
  return doc;
}

JobSpec job_from_json(const json& doc) {
  static const std::vector<std::string> known = {"family", "q",     "precision", "tol",
                                                 "nmax",   "nodes", "max_nodes", "route",
                                                 "format", "residual_tol", "outputs"};
  if (!doc.is_object()) throw std::invalid_argument("job must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("unknown job field '" + key + "'");
    }
  }
  JobSpec job;
  if (doc.contains("family")) {
    const auto& family = doc.at("family");
    if (!family.is_object()) throw std::invalid_argument("job field 'family' must be an object");
    if (family.contains("preset") == family.contains("params")) {
      throw std::invalid_argument("family needs exactly one of 'preset' and 'params'");
    }
    if (family.contains("preset")) {
      job.preset = text_field(family, "preset", "");
      job.args = string_list(family, "args");
    } else {
      job.params = string_list(family, "params");
    }
  }
  job.q = text_field(doc, "q", job.q);
  job.precision = count_field(doc, "precision", job.precision);
  job.tol = text_field(doc, "tol", "");
  job.nmax = count_field(doc, "nmax", job.nmax);
  job.nodes = count_field(doc, "nodes", job.nodes);
  job.max_nodes = count_field(doc, "max_nodes", job.max_nodes);
  job.route = text_field(doc, "route", job.route);
  job.format = text_field(doc, "format", job.format);
  job.residual_tol = text_field(doc, "residual_tol", "");
  job.outputs = string_list(doc, "outputs");
  for (const auto& s : job.outputs) {
    if (std::find(kSelectors.begin(), kSelectors.end(), s) == kSelectors.end()) {
      throw std::invalid_argument("unknown artifact selector '" + s + "'");
    }
  }
  return job;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weights and orthogonality checks for q-lattice polynomial families"};
  app.require_subcommand(1);

  auto* presets = app.add_subcommand("presets", "preset catalog");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "dump the catalog");
  std::string list_format = "csv";
  presets_list->add_option("--format", list_format, "csv or json");

  std::map<std::string, JobFlags> flags;
  std::map<std::string, CLI::App*> commands;
  const std::vector<std::pair<std::string, std::string>> described = {
      {"weights", "weight table"},
      {"recurrence", "alpha/beta table"},
      {"reparam", "canonical form and case tag"},
      {"verify", "Gram, moment and norm checks as JSON"},
      {"moments", "moment table m_k"},
      {"run", "every selector listed in the job outputs"},
      {"job", "print the merged JobSpec as JSON"},
  };
  std::string out_dir;
  for (const auto& [name, help] : described) {
    commands[name] = app.add_subcommand(name, help);
    flags[name].attach(*commands[name]);
  }
  commands["run"]->add_option("--out-dir", out_dir, "write <selector>.<csv|json> files here");

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (presets_list->parsed()) {
      if (list_format != "csv" && list_format != "json") {
        throw std::invalid_argument("format must be csv or json");
      }
      JobSpec job;
      job.format = list_format;
      out << presets_artifact(job).body;
      return kOk;
    }
    for (const auto& [name, cmd] : commands) {
      if (!cmd->parsed()) continue;
      const JobSpec job = flags[name].merged();
      if (name == "job") {
        out << to_json(job).dump(2) << '\n';
        return kOk;
      }
      if (name != "run") {
        const auto artifact = guarded(name, job, err);
        out << artifact.body;
        return artifact.code;
      }
      if (job.outputs.empty()) throw std::invalid_argument("run needs --outputs or a job file");
      int worst = kOk;
      for (const auto& selector : job.outputs) {
        const auto artifact = guarded(selector, job, err);
        if (!out_dir.empty() && !artifact.body.empty()) {
          std::filesystem::create_directories(out_dir);
          const auto path = std::filesystem::path(out_dir) / (selector + "." + artifact.extension);
          std::ofstream file(path);
          if (!file) throw std::invalid_argument("cannot write '" + path.string() + "'");
          file << artifact.body;
        } else {
          out << artifact.body;
        }
        if (artifact.code == kBadInput) return kBadInput;
        worst = std::max(worst, artifact.code);
      }
      return worst;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return kBadInput;
}

}  // namespace qaskey::cli
