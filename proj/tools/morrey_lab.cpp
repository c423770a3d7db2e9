// morrey-lab: command-line front end.
// Exit codes: 0 success, 1 invariant failure, 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "morrey/morrey.hpp"

#ifndef MORREY_VERSION
#define MORREY_VERSION "unknown"
#endif
#ifndef MORREY_BUILD_TYPE
#define MORREY_BUILD_TYPE "unknown"
#endif

using namespace morrey;

namespace {

constexpr int kOk = 0;
constexpr int kInvariant = 1;
constexpr int kUsage = 2;

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text_file(out, text);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse number '" + tok + "' in list '" + s + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("empty number list");
  return out;
}

LevelWindow window_for(const VectorFunction& f, std::optional<int> k_min) {
  return LevelWindow::make(k_min.value_or(f.root().level - 2), f.finest_level(), f.root());
}

std::string input_hash(const std::string& path) { return content_hash(read_text_file(path)); }

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string input, op = "integral", out;
  double alpha = 0.5;
  std::optional<int> k_min;
};

int run_eval(const EvalArgs& a) {
  const auto f = function_from_json(read_json_file(a.input));
  const auto w = window_for(f, a.k_min);
  OperatorField g;
  if (a.op == "integral")
    g = integral_dyadic(f, a.alpha, w);
  else if (a.op == "maximal")
    g = maximal_dyadic(f, a.alpha, w);
  else if (a.op == "hl")
    g = hl_maximal_dyadic(f[0], w);
  else if (a.op == "continuous") {
    std::vector<double> v(f[0].cell_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = integral_continuous(f, a.alpha, f[0].cell(i).center()).value;
    g = OperatorField(GridFunction(f.root(), f.finest_level(), std::move(v)));
  } else
    throw InvalidArgument("unknown operator '" + a.op + "'");
  if (a.out.size() >= 4 && a.out.substr(a.out.size() - 4) == ".csv") {
    std::string csv = "cell";
    for (int d = 0; d < g.dim(); ++d) csv += ",x" + std::to_string(d + 1);
    csv += ",value\n";
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      csv += std::to_string(i);
      for (double x : g.grid().cell(i).center()) csv += "," + format_double(x);
      csv += "," + format_double(g.value(i)) + "\n";
    }
    write_text_file(a.out, csv);
    return kOk;
  }
  json j = field_json(g);
  j["invocation"] = json{{"op", a.op}, {"alpha", a.alpha}, {"k_min", w.k_min}, {"input_hash", input_hash(a.input)}};
  emit(j, a.out);
  return kOk;
}

struct NormArgs {
  std::string kind = "morrey", input, measure, out, op, cube_set = "dyadic", p = "2";
  double p0 = 2.0, q = 2.0, q0 = 2.0, beta = 1.0, alpha = 0.5;
  std::optional<int> k_min;
};

int run_norm(const NormArgs& a) {
  const auto mode = parse_cube_set_mode(a.cube_set);
  json inv{{"kind", a.kind}, {"cube_set", a.cube_set}};
  NormResult r;
  if (a.kind == "growth") {
    if (a.measure.empty()) throw InvalidArgument("--measure is required for the growth norm");
    const auto mu = measure_from_json(read_json_file(a.measure));
    const DyadicCube root = a.input.empty() ? unit_cube(mu.dim()) : function_from_json(read_json_file(a.input)).root();
    const auto w = LevelWindow::make(a.k_min.value_or(root.level - 2), mu.resolution(), root);
    r = measure_growth_norm(mu, a.beta, CubeSet{mode, w});
    inv["beta"] = a.beta;
    inv["measure_hash"] = input_hash(a.measure);
  } else {
    if (a.input.empty()) throw InvalidArgument("--input is required for " + a.kind);
    const auto f = function_from_json(read_json_file(a.input));
    const auto w = window_for(f, a.k_min);
    const CubeSet cubes{mode, w};
    inv["input_hash"] = input_hash(a.input);
    inv["k_min"] = w.k_min;
    if (a.kind == "morrey") {
      const auto p = parse_list(a.p);
      r = morrey_norm(f[0], p.front(), a.p0, cubes);
      inv["p"] = p.front();
      inv["p0"] = a.p0;
    } else if (a.kind == "product-morrey" || a.kind == "product") {
      const auto p = parse_list(a.p);
      r = product_morrey_norm(f, p, a.p0, cubes);
      inv["P"] = p;
      inv["p0"] = a.p0;
    } else if (a.kind == "radon-morrey" || a.kind == "radon") {
      if (a.measure.empty()) throw InvalidArgument("--measure is required for the Radon-Morrey norm");
      const auto mu = measure_from_json(read_json_file(a.measure));
      OperatorField g;
      if (a.op.empty() || a.op == "none")
        g = OperatorField(f[0]);
      else if (a.op == "integral")
        g = integral_dyadic(f, a.alpha, w);
      else if (a.op == "maximal")
        g = maximal_dyadic(f, a.alpha, w);
      else
        throw InvalidArgument("unknown operator '" + a.op + "'");
      r = radon_morrey_norm(g, mu, a.q, a.q0, cubes);
      inv["q"] = a.q;
      inv["q0"] = a.q0;
      inv["op"] = a.op.empty() ? "none" : a.op;
      if (!a.op.empty() && a.op != "none") inv["alpha"] = a.alpha;
      inv["measure_hash"] = input_hash(a.measure);
    } else {
      throw InvalidArgument("unknown norm kind '" + a.kind + "'");
    }
  }
  json j = norm_json(r);
  j["invocation"] = inv;
  emit(j, a.out);
  return kOk;
}

struct SparseArgs {
  bool build = false, verify = false;
  std::string input, certificate, out;
  std::optional<double> threshold;
  double eta = 0.5;
  std::optional<int> k_min;
};

int run_sparse(const SparseArgs& a) {
  if (a.build == a.verify) throw InvalidArgument("sparse needs exactly one of --build or --verify");
  if (a.build) {
    if (a.input.empty()) throw InvalidArgument("--input is required with --build");
    const auto f = function_from_json(read_json_file(a.input));
    const double A = a.threshold.value_or(default_threshold(f.m(), f.dim()));
    const auto fam = build_sparse(f, A, window_for(f, a.k_min));
    emit(certificate_json(fam, input_hash(a.input)), a.out);
    std::cerr << "sparse family: " << fam.members.size() << " cubes, realized eta " << format_double(fam.eta) << "\n";
    return kOk;
  }
  if (a.certificate.empty()) throw InvalidArgument("--certificate is required with --verify");
  std::string recorded;
  const auto fam = certificate_from_json(read_json_file(a.certificate), &recorded);
  const auto v = verify_sparse(fam, a.eta);
  json j{{"certified", v.certified}, {"eta_required", a.eta}, {"realized_eta", v.realized_eta}};
  if (!v.certified) {
    j["failure"] = v.failure;
    if (v.pair) j["pair"] = json::array({cube_json(fam.members[v.pair->first].cube), cube_json(fam.members[v.pair->second].cube)});
    if (v.cube) j["cube"] = cube_json(fam.members[*v.cube].cube);
  }
  bool ok = v.certified;
  if (!a.input.empty()) {
    const bool match = input_hash(a.input) == recorded;
    j["input_hash_matches"] = match;
    ok = ok && match;
  }
  emit(j, a.out);
  return ok ? kOk : kInvariant;
}

struct ExponentArgs {
  int n = 1, m = 1;
  std::string p = "2";
  double p0 = 2.0, alpha = 0.5, beta = 0.25;
  std::string regime = "thm1.1";
};

int run_exponents(const ExponentArgs& a) {
  const auto c = exponents(a.n, a.m, parse_list(a.p), a.p0, a.alpha, a.beta, parse_regime(a.regime));
  emit(exponents_json(c), "");
  for (const auto& v : c.violations) std::cerr << "violated: " << v.hypothesis << " (" << v.detail << ")\n";
  return c.valid() ? kOk : kInvariant;
}

struct HedbergArgs {
  ExponentArgs e{1, 1, "1.2", 1.2, 0.5, 0.25, "thm1.1"};
  std::optional<double> M;
  bool check = false;
  std::string input;
  std::uint64_t seed = 1;
  std::optional<int> k_min;
  std::string out;
};

int run_hedberg(const HedbergArgs& a) {
  const auto regime = parse_regime(a.e.regime);
  if (!a.check) {
    if (!a.M) throw InvalidArgument("hedberg needs --M or --check");
    // Only the crossing hypotheses matter for the one-dimensional optimisation.
    ExponentSet e;
    e.n = a.e.n;
    e.m = a.e.m;
    e.p0 = a.e.p0;
    e.alpha = a.e.alpha;
    e.beta = a.e.beta;
    e.regime = regime;
    const auto opt = hedberg_optimal(*a.M, e);
    emit(json{{"M", *a.M},
              {"t_star", opt.t_star},
              {"bound", opt.bound},
              {"numeric_crossing", numeric_crossing(*a.M, e)},
              {"numeric_minimum", numeric_minimum(*a.M, e)}},
         a.out);
    return kOk;
  }
  const auto e = require_exponents(a.e.n, a.e.m, parse_list(a.e.p), a.e.p0, a.e.alpha, a.e.beta, regime);
  VectorFunction f;
  json inv{{"exponents", exponents_json({e, {}})}};
  if (!a.input.empty()) {
    f = function_from_json(read_json_file(a.input));
    inv["input_hash"] = input_hash(a.input);
  } else {
    Rng rng = trial_rng(a.seed, 0);
    const int K = e.n == 1 ? 7 : 4;
    std::vector<GridFunction> comps;
    for (int j = 0; j < e.m; ++j) comps.push_back(random_input(InputFamily::lognormal_cells, unit_cube(e.n), K, rng));
    f = VectorFunction(std::move(comps));
    inv["seed"] = a.seed;
  }
  if (f.m() != e.m || f.dim() != e.n) throw InvalidArgument("input (n, m) does not match --n/--m");
  const auto w = window_for(f, a.k_min);
  const auto s = hedberg_ratio(f, e, w);
  const auto fd = dilate(f, -1);
  const auto sd = hedberg_ratio(fd, e, LevelWindow::make(w.k_min - 1, w.k_max - 1, fd.root()));
  const double residual = s.sup > 0.0 ? std::abs(sd.sup / s.sup - 1.0) : 0.0;
  const auto tc = telescoping_constants(hedberg_pointwise_bound(f, e, w).normalized, e, w);
  emit(json{{"sup", s.sup},
            {"median", s.median},
            {"min", s.min},
            {"infinite_cells", s.infinite_cells},
            {"dilated_sup", sd.sup},
            {"dilation_residual", residual},
            {"telescoping_inner_constant", tc.inner},
            {"telescoping_outer_constant", tc.outer},
            {"invocation", inv}},
       a.out);
  return s.infinite_cells == 0 && std::isfinite(s.sup) && residual <= 1e-9 ? kOk : kInvariant;
}

struct ExperimentArgs {
  std::string regime, config, out, format;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string input_family, measure_family, cube_set;
  bool fuzz = false;
};

int run_experiment(const ExperimentArgs& a, int jobs) {
  const auto regime = parse_regime(a.regime);
  ExperimentConfig c;
  if (a.seed) c.seed = *a.seed;
  if (a.trials) c.trials = *a.trials;
  if (!a.input_family.empty()) c.input = parse_input_family(a.input_family);
  if (!a.measure_family.empty()) c.measure = parse_measure_family(a.measure_family);
  if (!a.cube_set.empty()) c.cube_set = parse_cube_set_mode(a.cube_set);
  c = config_from_json(a.config.empty() ? json::object() : read_json_file(a.config), c);

  if (a.fuzz) {
    const auto recs = violation_fuzzer(c, jobs);
    json rows = json::array();
    for (const auto& r : recs) rows.push_back(json{{"overshoot", r.overshoot}, {"ratio", r.ratio}});
    const json j{{"config", config_json(c)}, {"config_hash", config_hash(c)}, {"outside_domain", rows}};
    emit(j, a.out);
    return kOk;
  }

  std::string format = a.format;
  if (format.empty()) format = a.out.size() >= 4 && a.out.substr(a.out.size() - 4) == ".csv" ? "csv" : "json";
  const auto fmt = parse_report_format(format);
  const auto rep = run_trace_experiment(c, regime, jobs);
  if (a.out.empty())
    std::cout << render_report(rep, fmt);
  else
    emit_report(rep, fmt, a.out);

  json summary{{"regime", rep.regime}, {"config", config_json(c)}, {"config_hash", rep.config_hash},
               {"inputs_hash", rep.inputs_hash}, {"trials", rep.trials.size()}, {"skipped", rep.skipped},
               {"max_dilation_residual", rep.max_residual}, {"failures", rep.failures}};
  json groups = json::array();
  for (const auto& g : rep.groups)
    groups.push_back(json{{"n", g.n}, {"m", g.m}, {"sup", g.sup}, {"median", g.median}});
  summary["groups"] = groups;
  (a.out.empty() ? std::cerr : std::cout) << summary.dump(2) << "\n";
  return rep.passed() ? kOk : kInvariant;
}

struct OracleArgs {
  bool check = false;
  std::uint64_t seed = 7;
  int instances = 100;
};

int run_oracle(const OracleArgs& a) {
  if (!a.check) throw InvalidArgument("oracle needs --check");
  const auto o = oracle_suite(a.seed, a.instances);
  const auto c = closed_form_suite();
  std::cout << "oracle: " << (o.cases - o.failures) << "/" << o.cases << " instances passed, worst relative error "
            << format_double(o.worst) << "\n";
  std::cout << "closed-form: " << (c.cases - c.failures) << "/" << c.cases << " checks passed, worst relative error "
            << format_double(c.worst) << "\n";
  for (const auto& n : o.notes) std::cout << "  " << n << "\n";
  for (const auto& n : c.notes) std::cout << "  " << n << "\n";
  return o.passed() && c.passed() ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"morrey-lab: dyadic Morrey-space operators, norms and trace-inequality experiments"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for experiments")->check(CLI::PositiveNumber);
  app.set_version_flag("--version",
                       std::string("morrey-lab ") + MORREY_VERSION + " (C++" + std::to_string(__cplusplus / 100 % 100) +
                           ", " + __VERSION__ + ", " + MORREY_BUILD_TYPE + ")");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a dyadic operator on a grid function");
  eval->add_option("--input", ev.input, "Grid function JSON");
  eval->add_option("--op", ev.op, "integral | maximal | hl | continuous");
  eval->add_option("--alpha", ev.alpha, "Order alpha");
  eval->add_option("--k-min", ev.k_min, "Coarsest level of the window (default level(root) - 2)");
  eval->add_option("--out", ev.out, "Output file (default stdout); .csv writes one row per cell");

  NormArgs nm;
  auto* norm = app.add_subcommand("norm", "Compute a Morrey-type norm with its witness cube");
  norm->add_option("--kind", nm.kind, "morrey | product | radon | growth");
  norm->add_option("--input", nm.input, "Grid function JSON");
  norm->add_option("--measure", nm.measure, "Measure JSON");
  norm->add_option("--p", nm.p, "p, or comma-separated p_1,...,p_m");
  norm->add_option("--p0", nm.p0, "Morrey index p0");
  norm->add_option("--q", nm.q, "Radon-Morrey q");
  norm->add_option("--q0", nm.q0, "Radon-Morrey q0");
  norm->add_option("--beta", nm.beta, "Growth exponent");
  norm->add_option("--op", nm.op, "Field for radon-morrey: none | integral | maximal");
  norm->add_option("--alpha", nm.alpha, "Operator order for --op");
  norm->add_option("--cube-set", nm.cube_set, "dyadic | dyadic-plus-shifts");
  norm->add_option("--k-min", nm.k_min, "Coarsest level of the window");
  norm->add_option("--out", nm.out, "Output file (default stdout)");

  SparseArgs sp;
  auto* sparse = app.add_subcommand("sparse", "Build or verify a sparse-family certificate");
  sparse->add_flag("--build", sp.build, "Build a family from --input");
  sparse->add_flag("--verify", sp.verify, "Verify --certificate");
  sparse->add_option("--input", sp.input, "Grid function JSON");
  sparse->add_option("--certificate", sp.certificate, "Certificate JSON");
  sparse->add_option("--A", sp.threshold, "Stopping threshold (default 2^{mn+1})");
  sparse->add_option("--eta", sp.eta, "Required sparsity for --verify");
  sparse->add_option("--k-min", sp.k_min, "Coarsest level of the window");
  sparse->add_option("--out", sp.out, "Output file (default stdout)");

  ExponentArgs ex;
  auto* expo = app.add_subcommand("exponents", "Validate an exponent tuple and derive theta, q, q0");
  expo->add_option("--n", ex.n);
  expo->add_option("--m", ex.m);
  expo->add_option("--p", ex.p, "p_1,...,p_m");
  expo->add_option("--p0", ex.p0);
  expo->add_option("--alpha", ex.alpha);
  expo->add_option("--beta", ex.beta);
  expo->add_option("--regime", ex.regime, "thm1.1 | thm1.2 | thm2.1 | thm2.2");

  HedbergArgs hb;
  auto* hed = app.add_subcommand("hedberg", "Hedberg optimisation or the pointwise ratio-field check");
  hed->add_option("--M", hb.M, "Value of the local maximal term");
  hed->add_flag("--check", hb.check, "Measure I_alpha / dominating field on an instance");
  hed->add_option("--n", hb.e.n);
  hed->add_option("--m", hb.e.m);
  hed->add_option("--p", hb.e.p, "p_1,...,p_m");
  hed->add_option("--p0", hb.e.p0);
  hed->add_option("--alpha", hb.e.alpha);
  hed->add_option("--beta", hb.e.beta);
  hed->add_option("--regime", hb.e.regime, "thm1.1 | thm1.2");
  hed->add_option("--input", hb.input, "Grid function JSON (default: seeded random input)");
  hed->add_option("--seed", hb.seed);
  hed->add_option("--k-min", hb.k_min, "Coarsest level of the window");
  hed->add_option("--out", hb.out, "Output file (default stdout)");

  ExperimentArgs xp;
  auto* exp = app.add_subcommand("experiment", "Measure trace-inequality constants over random trials");
  exp->add_option("--regime", xp.regime, "thm1.1 | thm1.2 | thm2.1 | thm2.2");
  exp->add_option("--config", xp.config, "Config JSON (overrides flags)");
  exp->add_option("--out", xp.out, "Report path; .csv selects CSV");
  exp->add_option("--format", xp.format, "json | csv");
  exp->add_option("--seed", xp.seed);
  exp->add_option("--trials", xp.trials);
  exp->add_option("--input-family", xp.input_family, "indicator-unions | log-normal-cells | power-profile");
  exp->add_option("--measure-family", xp.measure_family, "cell-lebesgue | hyperplane | random-atoms");
  exp->add_option("--cube-set", xp.cube_set, "dyadic | dyadic-plus-shifts");
  exp->add_flag("--fuzz", xp.fuzz, "Sample exponents outside the admissible domain and report ratios only");

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "Compare the operators against the brute-force oracle");
  orc->add_flag("--check", oa.check, "Run the oracle and closed-form checks");
  orc->add_option("--seed", oa.seed);
  orc->add_option("--instances", oa.instances);

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == argv[1];
    if (!known) {
      std::cerr << "unknown subcommand '" << argv[1] << "'\n";
      return kUsage;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  // Required options are checked after parsing so an unknown flag is always the reported error.
  auto missing = [](const CLI::App* sub, std::initializer_list<const char*> names) {
    for (const char* n : names)
      if (sub->count(n) == 0) {
        std::cerr << sub->get_name() << ": " << n << " is required\n";
        return true;
      }
    return false;
  };
  if ((*eval && missing(eval, {"--input"})) || (*expo && missing(expo, {"--n", "--m", "--p", "--p0", "--alpha"})) ||
      (*exp && missing(exp, {"--regime"})))
    return kUsage;

  try {
    if (*eval) return run_eval(ev);
    if (*norm) return run_norm(nm);
    if (*sparse) return run_sparse(sp);
    if (*expo) return run_exponents(ex);
    if (*hed) return run_hedberg(hb);
    if (*exp) return run_experiment(xp, jobs);
    if (*orc) return run_oracle(oa);
  } catch (const InvalidExponent& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
