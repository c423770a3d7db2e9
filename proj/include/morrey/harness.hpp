#pragma once

// Seeded experiment harness: trace-inequality constants, brute-force oracle,
// property suites and report emission. Every result is a pure function of
// (config, seed); trial i draws from its own generator seeded by (seed, i).

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"
#include "morrey/generators.hpp"
#include "morrey/grid.hpp"
#include "morrey/hash.hpp"
#include "morrey/hedberg.hpp"
#include "morrey/io.hpp"
#include "morrey/norms.hpp"
#include "morrey/operators.hpp"
#include "morrey/sparse.hpp"

namespace morrey {

/// Runs fn(i) for i in [0, count) on at most `jobs` threads; rethrows the
/// exception of the lowest failing index.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Generator for stream `index` of a run seeded with `seed`.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// ---------------------------------------------------------------------------
// Configuration

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::vector<int> dims{1, 2};
  std::vector<int> arities{1, 2};
  std::vector<int> finest{7, 4};   // K per entry of dims
  int coarse_levels = 2;           // window starts this many levels above the root
  Range p_range{1.2, 4.0};         // each p_j
  Range p0_ratio{1.0, 1.5};        // p0 = p * ratio
  Range alpha_fraction{0.2, 0.8};  // alpha = fraction * min(mn, n/p0)
  Range beta_fraction{0.3, 0.9};   // beta = fraction * alpha (thm1.x)
  InputFamily input = InputFamily::lognormal_cells;
  MeasureFamily measure = MeasureFamily::cell_lebesgue;
  int trials = 200;
  CubeSetMode cube_set = CubeSetMode::dyadic;

  int finest_for(int n) const {
    for (std::size_t i = 0; i < dims.size(); ++i)
      if (dims[i] == n) return finest[i];
    throw InvalidArgument("no K configured for n = " + std::to_string(n));
  }
};

inline json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

inline json config_json(const ExperimentConfig& c) {
  return json{{"seed", c.seed},
              {"n", c.dims},
              {"m", c.arities},
              {"K", c.finest},
              {"coarse_levels", c.coarse_levels},
              {"P", range_json(c.p_range)},
              {"p0_ratio", range_json(c.p0_ratio)},
              {"alpha_fraction", range_json(c.alpha_fraction)},
              {"beta_fraction", range_json(c.beta_fraction)},
              {"input", to_string(c.input)},
              {"measure", to_string(c.measure)},
              {"trials", c.trials},
              {"cube_set", to_string(c.cube_set)}};
}

namespace detail {
inline std::vector<int> int_list(const json& v, const char* key) {
  if (v.is_number_integer()) return {v.get<int>()};
  if (v.is_array() && !v.empty()) return v.get<std::vector<int>>();
  throw InvalidArgument(std::string("config \"") + key + "\" must be an integer or a non-empty integer list");
}

inline Range range_from(const json& v, const char* key) {
  if (!v.is_array() || v.size() != 2) throw InvalidArgument(std::string("config \"") + key + "\" must be [lo, hi]");
  Range r{v[0].get<double>(), v[1].get<double>()};
  if (!(r.lo <= r.hi)) throw InvalidArgument(std::string("config \"") + key + "\" needs lo <= hi");
  return r;
}
}  // namespace detail

/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
inline ExperimentConfig config_from_json(const json& j, ExperimentConfig base = {}) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    try {
      if (k == "seed") base.seed = v.get<std::uint64_t>();
      else if (k == "n") base.dims = detail::int_list(v, "n");
      else if (k == "m") base.arities = detail::int_list(v, "m");
      else if (k == "K") base.finest = detail::int_list(v, "K");
      else if (k == "coarse_levels") base.coarse_levels = v.get<int>();
      else if (k == "P") base.p_range = detail::range_from(v, "P");
      else if (k == "p0_ratio") base.p0_ratio = detail::range_from(v, "p0_ratio");
      else if (k == "alpha_fraction") base.alpha_fraction = detail::range_from(v, "alpha_fraction");
      else if (k == "beta_fraction") base.beta_fraction = detail::range_from(v, "beta_fraction");
      else if (k == "input") base.input = parse_input_family(v.get<std::string>());
      else if (k == "measure") base.measure = parse_measure_family(v.get<std::string>());
      else if (k == "trials") base.trials = v.get<int>();
      else if (k == "cube_set") base.cube_set = parse_cube_set_mode(v.get<std::string>());
      else throw InvalidArgument("unknown config key \"" + k + "\"");
    } catch (const json::exception& e) {
      throw InvalidArgument("config \"" + k + "\": " + e.what());
    }
  }
  if (base.finest.size() == 1 && base.dims.size() > 1) base.finest.assign(base.dims.size(), base.finest.front());
  if (base.finest.size() != base.dims.size()) throw InvalidArgument("config \"K\" needs one entry per dimension in \"n\"");
  for (int n : base.dims)
    if (n < 1 || n > kMaxDim) throw InvalidArgument("config dimension out of range: " + std::to_string(n));
  for (int m : base.arities)
    if (m < 1) throw InvalidArgument("config arity must be >= 1");
  for (std::size_t i = 0; i < base.dims.size(); ++i)
    if (base.finest[i] < 0 || base.dims[i] * base.finest[i] > 20)
      throw CostGuard("config K = " + std::to_string(base.finest[i]) + " is too fine for n = " + std::to_string(base.dims[i]));
  if (base.trials < 0) throw InvalidArgument("config \"trials\" must be >= 0");
  if (base.coarse_levels < 0) throw InvalidArgument("config \"coarse_levels\" must be >= 0");
  if (!(base.p_range.lo > 1.0)) throw InvalidArgument("config \"P\" must lie in (1, inf)");
  if (!(base.p0_ratio.lo >= 1.0)) throw InvalidArgument("config \"p0_ratio\" must be >= 1");
  if (!(base.alpha_fraction.lo > 0.0 && base.alpha_fraction.hi < 1.0))
    throw InvalidArgument("config \"alpha_fraction\" must lie in (0, 1)");
  if (!(base.beta_fraction.lo > 0.0 && base.beta_fraction.hi <= 1.0))
    throw InvalidArgument("config \"beta_fraction\" must lie in (0, 1]");
  return base;
}

inline std::string config_hash(const ExperimentConfig& c) { return content_hash(config_json(c).dump()); }

/// Regimes that need p <= 1 cannot use m = 1, since every p_j > 1.
inline bool regime_admits(Regime r, int m) {
  return m >= 2 || r == Regime::integral_via_maximal || r == Regime::maximal_trace;
}

inline std::vector<std::pair<int, int>> admissible_combos(const ExperimentConfig& c, Regime r) {
  std::vector<std::pair<int, int>> out;
  for (int n : c.dims)
    for (int m : c.arities)
      if (regime_admits(r, m)) out.emplace_back(n, m);
  return out;
}

/// Rejection-samples an exponent tuple valid for `regime`.
inline ExponentSet sample_exponents(const ExperimentConfig& c, Regime regime, int n, int m, Rng& rng) {
  const bool small_p = regime == Regime::integral_via_integral || regime == Regime::integral_trace;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> exps(static_cast<std::size_t>(m));
    double inv_p = 0.0;
    for (auto& pj : exps) {
      pj = uniform(rng, c.p_range.lo, c.p_range.hi);
      inv_p += 1.0 / pj;
    }
    const double p = 1.0 / inv_p;
    if (small_p ? p > 1.0 : (regime == Regime::integral_via_maximal && p <= 1.0)) continue;
    const double p0 = p * uniform(rng, c.p0_ratio.lo, c.p0_ratio.hi);
    const double alpha = uniform(rng, c.alpha_fraction.lo, c.alpha_fraction.hi) * std::min<double>(m * n, n / p0);
    const double beta = uses_hedberg(regime) ? uniform(rng, c.beta_fraction.lo, c.beta_fraction.hi) * alpha : alpha;
    auto check = exponents(n, m, exps, p0, alpha, beta, regime);
    if (check.valid()) return check.set;
  }
  throw InvalidArgument("could not sample exponents for " + regime_name(regime) + " with n = " + std::to_string(n) +
                        ", m = " + std::to_string(m) + " from the configured ranges");
}

// ---------------------------------------------------------------------------
// Trace inequalities

struct TraceInstance {
  VectorFunction f;
  AtomicMeasure mu;
  LevelWindow window;
};

struct TraceEvaluation {
  double lhs = 0.0;
  double rhs = 0.0;
  NormResult lhs_norm;
  NormResult growth_norm;
  NormResult morrey_norm;
};

/// LHS: the Radon–Morrey norm of the regime's operator; RHS: the growth factor
/// times the product Morrey norm.
inline TraceEvaluation evaluate_trace(const TraceInstance& inst, const ExponentSet& e, CubeSetMode mode) {
  const CubeSet cubes{mode, inst.window};
  const OperatorField g = e.regime == Regime::maximal_trace ? maximal_dyadic(inst.f, e.alpha, inst.window)
                                                            : integral_dyadic(inst.f, e.alpha, inst.window);
  TraceEvaluation t;
  t.lhs_norm = radon_morrey_norm(g, inst.mu, e.q, e.q0, cubes);
  t.growth_norm = measure_growth_norm(inst.mu, e.growth_index(), cubes);
  t.morrey_norm = product_morrey_norm(inst.f, e.exps, e.p0, cubes);
  t.lhs = t.lhs_norm.value;
  t.rhs = std::pow(t.growth_norm.value, 1.0 / e.q) * t.morrey_norm.value;
  return t;
}

inline TraceInstance dilate(const TraceInstance& inst, int j) {
  const auto& w = inst.window;
  TraceInstance d{dilate(inst.f, j), dilate(inst.mu, j), {}};
  d.window = LevelWindow::make(w.k_min + j, w.k_max + j, DyadicCube{w.root.level + j, w.root.index});
  return d;
}

inline std::string instance_hash(const TraceInstance& inst, const ExponentSet& e) {
  const json j{{"function", function_json(inst.f)}, {"measure", measure_json(inst.mu)},
               {"window", json::array({inst.window.k_min, inst.window.k_max})}, {"exponents", exponents_json({e, {}})}};
  return content_hash(j.dump());
}

struct TrialRecord {
  std::size_t index = 0;
  int n = 0, m = 0, K = 0;
  ExponentSet exps;
  TraceEvaluation eval;
  double ratio = 0.0;
  double dilated_ratio = 0.0;
  double residual = 0.0;  // |dilated/ratio - 1|
  std::string instance_hash;
  bool skipped = false;
};

struct GroupStats {
  int n = 0, m = 0;
  std::size_t count = 0;
  double sup = 0.0, median = 0.0, min = 0.0;
  std::size_t sup_trial = 0;
};

struct ConstantReport {
  std::string regime;
  ExperimentConfig config;
  std::string config_hash;
  std::string inputs_hash;
  std::vector<TrialRecord> trials;  // skipped trials included, flagged
  std::size_t skipped = 0;
  std::vector<GroupStats> groups;
  double max_residual = 0.0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

inline TraceInstance trace_instance(const ExperimentConfig& c, int n, int m, int K, Rng& rng) {
  const DyadicCube root = unit_cube(n);
  std::vector<GridFunction> comps;
  for (int j = 0; j < m; ++j) comps.push_back(random_input(c.input, root, K, rng));
  return TraceInstance{VectorFunction(std::move(comps)), random_measure(c.measure, root, K, rng),
                       LevelWindow::make(-c.coarse_levels, K, root)};
}

inline TrialRecord run_trace_trial(const ExperimentConfig& c, Regime regime, std::size_t index,
                                   const std::vector<std::pair<int, int>>& combos) {
  Rng rng = trial_rng(c.seed, index);
  TrialRecord r;
  r.index = index;
  std::tie(r.n, r.m) = combos[index % combos.size()];
  r.K = c.finest_for(r.n);
  r.exps = sample_exponents(c, regime, r.n, r.m, rng);
  const auto inst = trace_instance(c, r.n, r.m, r.K, rng);
  r.instance_hash = instance_hash(inst, r.exps);
  r.eval = evaluate_trace(inst, r.exps, c.cube_set);
  if (r.eval.lhs == 0.0 && r.eval.rhs == 0.0) {
    r.skipped = true;
    return r;
  }
  r.ratio = r.eval.lhs / r.eval.rhs;
  const auto d = evaluate_trace(dilate(inst, -1), r.exps, c.cube_set);
  r.dilated_ratio = d.lhs / d.rhs;
  r.residual = std::abs(r.dilated_ratio / r.ratio - 1.0);
  return r;
}

/// Aggregates per-(n, m) statistics and applies the gates: finite ratios,
/// dilation residual <= 1e-9, sup <= 10 x median within each group.
inline void summarize(ConstantReport& rep) {
  rep.skipped = 0;
  rep.groups.clear();
  rep.failures.clear();
  rep.max_residual = 0.0;
  std::string joined;
  for (const auto& t : rep.trials) {
    joined += t.instance_hash;
    joined += '\n';
    if (t.skipped) {
      ++rep.skipped;
      continue;
    }
    if (!std::isfinite(t.ratio) || !std::isfinite(t.dilated_ratio))
      rep.failures.push_back("trial " + std::to_string(t.index) + ": non-finite ratio (instance " + t.instance_hash + ")");
    if (!(t.residual <= 1e-9))
      rep.failures.push_back("trial " + std::to_string(t.index) + ": dilation residual " + format_double(t.residual) +
                             " (instance " + t.instance_hash + ")");
    rep.max_residual = std::max(rep.max_residual, t.residual);
    auto g = std::find_if(rep.groups.begin(), rep.groups.end(), [&](const GroupStats& s) { return s.n == t.n && s.m == t.m; });
    if (g == rep.groups.end()) {
      rep.groups.push_back(GroupStats{t.n, t.m, 0, 0.0, 0.0, std::numeric_limits<double>::infinity(), t.index});
      g = std::prev(rep.groups.end());
    }
    ++g->count;
    if (t.ratio > g->sup || g->count == 1) {
      g->sup = t.ratio;
      g->sup_trial = t.index;
    }
    g->min = std::min(g->min, t.ratio);
  }
  rep.inputs_hash = content_hash(joined);
  std::sort(rep.groups.begin(), rep.groups.end(), [](const GroupStats& a, const GroupStats& b) {
    return std::pair(a.n, a.m) < std::pair(b.n, b.m);
  });
  for (auto& g : rep.groups) {
    std::vector<double> rs;
    for (const auto& t : rep.trials)
      if (!t.skipped && t.n == g.n && t.m == g.m) rs.push_back(t.ratio);
    g.median = median_of(rs);
    if (!(g.sup <= 10.0 * g.median))
      rep.failures.push_back("n=" + std::to_string(g.n) + ", m=" + std::to_string(g.m) + ": sup ratio " +
                             format_double(g.sup) + " exceeds 10 x median " + format_double(g.median) + " (trial " +
                             std::to_string(g.sup_trial) + ", instance " + rep.trials[g.sup_trial].instance_hash + ")");
  }
}

inline ConstantReport run_trace_experiment(const ExperimentConfig& c, Regime regime, int jobs = 1) {
  ConstantReport rep;
  rep.regime = regime_name(regime);
  rep.config = c;
  rep.config_hash = config_hash(c);
  const auto combos = admissible_combos(c, regime);
  if (combos.empty() && c.trials > 0)
    throw InvalidArgument(regime_name(regime) + " needs m >= 2 (p <= 1 is impossible with a single p_j > 1)");
  rep.trials.resize(static_cast<std::size_t>(c.trials));
  parallel_for(rep.trials.size(), jobs, [&](std::size_t i) { rep.trials[i] = run_trace_trial(c, regime, i, combos); });
  summarize(rep);
  return rep;
}

/// Exponents sampled outside the admissible domain: alpha in (n/p0, n/p), so
/// p0 < n/alpha fails while the growth index n - alpha p stays positive.
/// Records ratios only; an inequality with an unspecified constant cannot be refuted.
struct FuzzRecord {
  double overshoot = 0.0;  // alpha p0 / n  (> 1 outside the domain)
  double ratio = 0.0;
};

inline std::vector<FuzzRecord> violation_fuzzer(const ExperimentConfig& c, int jobs = 1) {
  std::vector<FuzzRecord> out(static_cast<std::size_t>(c.trials));
  const auto combos = admissible_combos(c, Regime::maximal_trace);
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, i, 1);
    const auto [n, m] = combos[i % combos.size()];
    const int K = c.finest_for(n);
    ExponentSet e;
    for (;;) {
      e = sample_exponents(c, Regime::maximal_trace, n, m, rng);
      if (e.p < e.p0) break;
    }
    const double lo = n / e.p0, hi = std::min<double>(n / e.p, m * n);
    if (!(lo < hi)) return;
    e.alpha = e.beta = uniform(rng, lo, hi);
    const auto inst = trace_instance(c, n, m, K, rng);
    const auto t = evaluate_trace(inst, e, c.cube_set);
    out[i] = FuzzRecord{e.alpha * e.p0 / n, t.rhs > 0.0 ? t.lhs / t.rhs : 0.0};
  });
  return out;
}

// ---------------------------------------------------------------------------
// Report emission

enum class ReportFormat { json, csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw InvalidArgument("unknown report format '" + s + "' (expected json or csv)");
}

inline json report_json(const ConstantReport& r) {
  json trials = json::array();
  json skipped = json::array();
  for (const auto& t : r.trials) {
    if (t.skipped) {
      skipped.push_back(t.index);
      continue;
    }
    trials.push_back(json{{"trial", t.index},
                          {"n", t.n},
                          {"m", t.m},
                          {"K", t.K},
                          {"exponents", exponents_json({t.exps, {}})},
                          {"lhs", t.eval.lhs},
                          {"rhs", t.eval.rhs},
                          {"ratio", t.ratio},
                          {"dilated_ratio", t.dilated_ratio},
                          {"dilation_residual", t.residual},
                          {"lhs_witness", norm_json(t.eval.lhs_norm)},
                          {"growth_witness", norm_json(t.eval.growth_norm)},
                          {"morrey_witness", norm_json(t.eval.morrey_norm)},
                          {"instance_hash", t.instance_hash}});
  }
  json groups = json::array();
  for (const auto& g : r.groups)
    groups.push_back(json{{"n", g.n}, {"m", g.m}, {"count", g.count}, {"sup", g.sup}, {"median", g.median},
                          {"min", g.min}, {"sup_trial", g.sup_trial}});
  return json{{"regime", r.regime},   {"config", config_json(r.config)}, {"config_hash", r.config_hash},
              {"inputs_hash", r.inputs_hash}, {"skipped", r.skipped},   {"skipped_trials", skipped},
              {"max_dilation_residual", r.max_residual}, {"groups", groups}, {"failures", r.failures},
              {"trials", trials}};
}

inline std::string report_csv(const ConstantReport& r) {
  std::string out =
      "regime,config_hash,inputs_hash,trial,n,m,K,P,p,p0,alpha,beta,theta,q,q0,lhs,rhs,ratio,dilated_ratio,"
      "dilation_residual,lhs_witness,growth_witness,morrey_witness,instance_hash\n";
  auto cube = [](const NormResult& nr) {
    std::string s = "(" + std::to_string(nr.witness.base.dim()) + " " + std::to_string(nr.witness.base.level);
    for (auto m : nr.witness.base.index) s += " " + std::to_string(m);
    if (nr.witness.shifted()) {
      s += " +";
      for (auto v : nr.witness.shift) s += std::to_string(v);
    }
    return s + ")";
  };
  for (const auto& t : r.trials) {
    if (t.skipped) continue;
    std::string P;
    for (double pj : t.exps.exps) P += (P.empty() ? "" : ";") + format_double(pj);
    const auto& e = t.exps;
    for (const std::string& field :
         {r.regime, r.config_hash, r.inputs_hash, std::to_string(t.index), std::to_string(t.n), std::to_string(t.m),
          std::to_string(t.K), P, format_double(e.p), format_double(e.p0), format_double(e.alpha),
          format_double(e.beta), format_double(e.theta), format_double(e.q), format_double(e.q0),
          format_double(t.eval.lhs), format_double(t.eval.rhs), format_double(t.ratio), format_double(t.dilated_ratio),
          format_double(t.residual), cube(t.eval.lhs_norm), cube(t.eval.growth_norm), cube(t.eval.morrey_norm),
          t.instance_hash}) {
      out += field;
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

inline std::string render_report(const ConstantReport& r, ReportFormat f) {
  return f == ReportFormat::json ? report_json(r).dump(2) + "\n" : report_csv(r);
}

inline void emit_report(const ConstantReport& r, ReportFormat f, const std::string& path) {
  write_text_file(path, render_report(r, f));
}

// ---------------------------------------------------------------------------
// Brute-force oracle

enum class OracleKind { maximal, integral };

namespace detail {
/// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

/// ∫_Q f for Q at or above the finest level: every cell whose center lies in Q.
inline double naive_integral(const GridFunction& f, const DyadicCube& q) {
  CompensatedSum s;
  for (std::size_t i = 0; i < f.cell_count(); ++i)
    if (q.contains(f.cell(i).center())) s.add(f.value(i) * f.cell_volume());
  return s.value();
}

/// l_Q^{alpha-mn} prod_j ∫_Q f_j for the level-k cube Q containing x, l_Q = 2^{-k}.
/// Below the finest level Q sits inside the cell of x, the integrals are
/// f_j(x) 2^{-kn}, and the term is 2^{-k alpha} prod_j f_j(x).
inline double naive_term(const VectorFunction& f, double alpha, int k, std::span<const double> x) {
  if (k > f.finest_level()) {
    double t = std::exp2(-k * alpha);
    for (const auto& g : f.components()) t *= g.value_at(x);
    return t;
  }
  const DyadicCube q = cube_containing(x, k);
  double t = std::exp2(k * (f.m() * f.dim() - alpha));
  for (const auto& g : f.components()) t *= naive_integral(g, q);
  return t;
}
}  // namespace detail

/// Direct evaluation of the defining sums at each cell center: every level's
/// cube is found by coordinate containment, every integral by a full cell scan,
/// and both tails are summed term by term until a term drops below 1e-18 of the
/// partial sum. Guarded to n = 1, m <= 2, K - level(root) <= 4.
inline OperatorField brute_force_oracle(const VectorFunction& f, double alpha, const LevelWindow& window, OracleKind kind) {
  if (f.dim() != 1 || f.m() > 2 || f.finest_level() - f.root().level > 4)
    throw CostGuard("brute-force oracle is limited to n = 1, m <= 2, K - level(root) <= 4");
  if (!(window.root == f.root()) || window.k_max != f.finest_level())
    throw InvalidArgument("oracle window must match the input lattice");
  const GridFunction& lat = f[0];
  std::vector<double> out(lat.cell_count());
  constexpr int kMaxTailLevels = 1 << 16;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = lat.cell(i).center();
    if (kind == OracleKind::maximal) {
      double best = 0.0;
      // Ancestor terms decrease and sub-cell terms shrink like l^alpha; 64 extra levels each way dominate both.
      for (int k = window.k_min - 64; k <= window.k_max + 64; ++k) {
        best = std::max(best, detail::naive_term(f, alpha, k, x));
      }
      out[i] = best;
      continue;
    }
    detail::CompensatedSum s;
    for (int k = window.k_min; k <= window.k_max; ++k) {
      // Locate the level-k cube containing x among the candidates meeting the root.
      DyadicCube hit = cube_containing(x, k);
      bool found = false;
      if (k >= f.root().level) {
        for_each_at_level(f.root(), k, [&](const DyadicCube& q) {
          if (q.contains(x)) {
            hit = q;
            found = true;
          }
        });
      } else {
        found = hit.contains(x);
      }
      if (!found) throw Error("oracle failed to locate the chain cube");
      double t = std::exp2(k * (f.m() * f.dim() - alpha));
      for (const auto& g : f.components()) t *= detail::naive_integral(g, hit);
      s.add(t);
    }
    for (int k = window.k_min - 1, steps = 0; steps < kMaxTailLevels; --k, ++steps) {
      const double t = detail::naive_term(f, alpha, k, x);
      s.add(t);
      if (t < 1e-18 * s.value()) break;
    }
    for (int k = window.k_max + 1, steps = 0; steps < kMaxTailLevels; ++k, ++steps) {
      const double t = detail::naive_term(f, alpha, k, x);
      s.add(t);
      if (t < 1e-18 * s.value() || t == 0.0) break;
    }
    out[i] = s.value();
  }
  return OperatorField(GridFunction(f.root(), f.finest_level(), std::move(out)));
}

// ---------------------------------------------------------------------------
// Suites

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // suite-specific worst metric
  std::vector<std::string> notes;

  bool passed() const { return failures == 0; }
};

/// Random small instances for the oracle: n = 1, m in {1, 2}, K - level(root) <= 4.
inline SuiteResult oracle_suite(std::uint64_t seed, int instances = 100) {
  SuiteResult r{"oracle", 0, 0, 0.0, {}};
  for (int i = 0; i < instances; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i), 2);
    const int m = 1 + i % 2;
    const int k0 = std::uniform_int_distribution<int>(-1, 2)(rng);
    const int K = k0 + std::uniform_int_distribution<int>(0, 4)(rng);
    const DyadicCube root{k0, IndexVec{std::uniform_int_distribution<std::int64_t>(-2, 2)(rng)}};
    std::vector<GridFunction> comps;
    for (int j = 0; j < m; ++j) {
      std::vector<double> v(std::size_t{1} << (K - k0));
      for (auto& x : v) x = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : std::exp(uniform(rng, -1.5, 1.5));
      comps.emplace_back(root, K, std::move(v));
    }
    const VectorFunction f(std::move(comps));
    const auto w = LevelWindow::make(k0 - std::uniform_int_distribution<int>(0, 3)(rng), K, root);
    const double alpha = uniform(rng, 0.05, m - 0.05);
    const auto I = integral_dyadic(f, alpha, w);
    const auto Io = brute_force_oracle(f, alpha, w, OracleKind::integral);
    const auto M = maximal_dyadic(f, alpha, w);
    const auto Mo = brute_force_oracle(f, alpha, w, OracleKind::maximal);
    double worst = 0.0;
    for (std::size_t c = 0; c < I.cell_count(); ++c)
      worst = std::max({worst, rel_diff(I.value(c), Io.value(c)), rel_diff(M.value(c), Mo.value(c))});
    ++r.cases;
    r.worst = std::max(r.worst, worst);
    if (!(worst <= 1e-12)) {
      ++r.failures;
      r.notes.push_back("instance " + std::to_string(i) + ": relative error " + format_double(worst));
    }
  }
  return r;
}

/// f = 1 on [0,1): integral 3+2√2 (m=1, alpha=1/2) and 3 (m=2, alpha=1); maximal 1.
inline SuiteResult closed_form_suite() {
  SuiteResult r{"closed-form", 0, 0, 0.0, {}};
  const DyadicCube root = unit_cube(1);
  auto check = [&](const std::string& what, const OperatorField& g, double expect) {
    ++r.cases;
    double worst = 0.0;
    for (double v : g.values()) worst = std::max(worst, rel_diff(v, expect));
    r.worst = std::max(r.worst, worst);
    if (!(worst <= 1e-12)) {
      ++r.failures;
      r.notes.push_back(what + ": relative error " + format_double(worst));
    }
  };
  for (int K : {0, 3, 6}) {
    const auto w = LevelWindow::make(-2, K, root);
    const VectorFunction one{GridFunction::constant(root, K, 1.0)};
    const VectorFunction two{GridFunction::constant(root, K, 1.0), GridFunction::constant(root, K, 1.0)};
    const std::string tag = " (K=" + std::to_string(K) + ")";
    check("integral m=1 alpha=1/2" + tag, integral_dyadic(one, 0.5, w), 3.0 + 2.0 * std::numbers::sqrt2);
    check("integral m=2 alpha=1" + tag, integral_dyadic(two, 1.0, w), 3.0);
    check("maximal m=1 alpha=1/2" + tag, maximal_dyadic(one, 0.5, w), 1.0);
    check("maximal m=2 alpha=1" + tag, maximal_dyadic(two, 1.0, w), 1.0);
  }
  return r;
}

inline GridFunction suite_function(Rng& rng, int n, int K) {
  const auto fam = static_cast<InputFamily>(std::uniform_int_distribution<int>(0, 2)(rng));
  return random_input(fam, unit_cube(n), K, rng);
}

/// morrey_norm(f, p1, p0) >= morrey_norm(f, p2, p0) for p0 >= p1 >= p2 > 0.
inline SuiteResult embedding_suite(std::uint64_t seed, int trials = 1000, CubeSetMode mode = CubeSetMode::dyadic) {
  SuiteResult r{"embedding", 0, 0, 0.0, {}};
  for (int i = 0; i < trials; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i), 3);
    const int n = 1 + i % 2;
    const int K = n == 1 ? 6 : 3;
    const auto f = suite_function(rng, n, K);
    const double p0 = uniform(rng, 0.5, 4.0);
    const double p1 = uniform(rng, 0.1, p0);
    const double p2 = uniform(rng, 0.05, p1);
    const CubeSet cubes{mode, LevelWindow::make(-2, K, unit_cube(n))};
    const double a = morrey_norm(f, p1, p0, cubes).value;
    const double b = morrey_norm(f, p2, p0, cubes).value;
    ++r.cases;
    const double excess = b > a ? (b - a) / b : 0.0;
    r.worst = std::max(r.worst, excess);
    if (excess > 1e-12) {
      ++r.failures;
      r.notes.push_back("trial " + std::to_string(i) + ": " + format_double(a) + " < " + format_double(b));
    }
  }
  return r;
}

/// ||M f||_p <= p/(p-1) ||f||_p (1 + 1e-9) on the root; worst = max of the ratio to the constant.
inline SuiteResult hl_bound_suite(std::uint64_t seed, int trials = 500) {
  SuiteResult r{"hl-maximal", 0, 0, 0.0, {}};
  for (int i = 0; i < trials; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i), 4);
    const int n = 1 + i % 2;
    const int K = n == 1 ? 8 : 4;
    const auto f = suite_function(rng, n, K);
    const double p = uniform(rng, std::nextafter(1.0, 2.0), 4.0);
    const auto w = LevelWindow::make(-1, K, unit_cube(n));
    const double lhs = lp_norm_on_cube(hl_maximal_dyadic(f, w).grid(), p, w.root);
    const double rhs = p / (p - 1.0) * lp_norm_on_cube(f, p, w.root);
    ++r.cases;
    if (rhs > 0.0) r.worst = std::max(r.worst, lhs / rhs);
    if (!(lhs <= rhs * (1.0 + 1e-9))) {
      ++r.failures;
      r.notes.push_back("trial " + std::to_string(i) + ": p = " + format_double(p) + ", ratio " + format_double(lhs / rhs));
    }
  }
  return r;
}

struct SparseSuiteResult {
  SuiteResult base{"sparse", 0, 0, 0.0, {}};
  std::size_t certified = 0;
  std::size_t eta_shortfalls = 0;
  double min_eta = 1.0;
  double max_constant_maximal = 0.0;
  double max_constant_integral = 0.0;
  double worst_constant_drift = 0.0;  // |C(dilated)/C - 1|
};

/// Builds default-threshold families, certifies them at eta = 1/2, and measures
/// the domination constants before and after one dyadic dilation.
inline SparseSuiteResult sparse_suite(std::uint64_t seed, int instances = 200, double eta_target = 0.5) {
  SparseSuiteResult r;
  for (int i = 0; i < instances; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i), 5);
    const int n = 1 + i % 2;
    const int m = 1 + (i / 2) % 2;
    const int K = n == 1 ? 7 : 4;
    std::vector<GridFunction> comps;
    for (int j = 0; j < m; ++j) comps.push_back(suite_function(rng, n, K));
    const VectorFunction f(std::move(comps));
    const double alpha = uniform(rng, 0.1, 0.9) * m * n;
    const auto w = LevelWindow::make(-1, K, unit_cube(n));

    struct Measured {
      SparseVerdict verdict;
      double eta = 0.0;
      double cm = 0.0, ci = 0.0;
    };
    auto measure = [&](const VectorFunction& g, const LevelWindow& win) {
      const auto fam = build_sparse(g, default_threshold(m, n), win);
      Measured out{verify_sparse(fam, eta_target), fam.eta, 0.0, 0.0};
      out.cm = domination_constant(maximal_dyadic(g, alpha, win), sparse_maximal_bound(fam, g, alpha));
      out.ci = domination_constant(integral_dyadic(g, alpha, win), sparse_integral_bound(fam, g, alpha));
      return out;
    };
    const auto a = measure(f, w);
    const auto fd = dilate(f, -1);
    const auto b = measure(fd, LevelWindow::make(w.k_min - 1, w.k_max - 1, fd.root()));
    const double cm = a.cm, ci = a.ci;

    ++r.base.cases;
    const std::string tag = "instance " + std::to_string(i) + " (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")";
    r.min_eta = std::min(r.min_eta, a.eta);
    if (a.verdict.certified) {
      ++r.certified;
    } else {
      if (a.eta < eta_target) ++r.eta_shortfalls;
      ++r.base.failures;
      r.base.notes.push_back(tag + ": not certified at eta " + format_double(eta_target) + " (realized " +
                             format_double(a.eta) + "): " + a.verdict.failure);
      continue;
    }
    const double cmd = b.cm, cid = b.ci;
    const double drift = std::max(std::abs(cmd / cm - 1.0), std::abs(cid / ci - 1.0));
    r.max_constant_maximal = std::max(r.max_constant_maximal, cm);
    r.max_constant_integral = std::max(r.max_constant_integral, ci);
    r.worst_constant_drift = std::max(r.worst_constant_drift, drift);
    if (!std::isfinite(cm) || !std::isfinite(ci) || !(drift <= 0.1)) {
      ++r.base.failures;
      r.base.notes.push_back(tag + ": constants " + format_double(cm) + ", " + format_double(ci) + " drift " +
                             format_double(drift));
    }
  }
  r.base.worst = r.worst_constant_drift;
  return r;
}

/// One dyadic dilation (j = -1) multiplies: Morrey norms by 2^{n/p0}, the growth
/// norm by 2^{-beta}, operators by 2^{alpha}, and the Radon–Morrey norm of a
/// field by 2^{n(1/q0 - 1/q)} times the field's own factor.
inline SuiteResult dilation_suite(std::uint64_t seed, int instances = 100) {
  SuiteResult r{"dilation", 0, 0, 0.0, {}};
  for (int i = 0; i < instances; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i), 6);
    const int n = 1 + i % 2;
    const int m = 1 + (i / 2) % 2;
    const int K = n == 1 ? 6 : 3;
    ExperimentConfig c;
    c.input = static_cast<InputFamily>(i % 3);
    c.measure = static_cast<MeasureFamily>((i / 3) % 3);
    c.coarse_levels = 2;
    const auto inst = trace_instance(c, n, m, K, rng);
    const auto dil = dilate(inst, -1);
    const auto e = sample_exponents(c, Regime::maximal_trace, n, m, rng);
    const double beta = uniform(rng, 0.1, 1.0) * n;
    const double q = uniform(rng, 0.5, 3.0), q0 = q * uniform(rng, 1.0, 2.0);
    const auto mode = i % 4 == 3 ? CubeSetMode::dyadic_plus_shifts : CubeSetMode::dyadic;
    const CubeSet cs{mode, inst.window}, cd{mode, dil.window};

    double worst = 0.0;
    auto expect = [&](double before, double after, double factor) { worst = std::max(worst, rel_diff(after, before * factor)); };
    const double mf = std::exp2(n / e.p0);
    expect(morrey_norm(inst.f[0], e.exps[0], std::max(e.p0, e.exps[0]), cs).value,
           morrey_norm(dil.f[0], e.exps[0], std::max(e.p0, e.exps[0]), cd).value, std::exp2(n / std::max(e.p0, e.exps[0])));
    expect(product_morrey_norm(inst.f, e.exps, e.p0, cs).value, product_morrey_norm(dil.f, e.exps, e.p0, cd).value, mf);
    expect(measure_growth_norm(inst.mu, beta, cs).value, measure_growth_norm(dil.mu, beta, cd).value, std::exp2(-beta));
    const auto Mf = maximal_dyadic(inst.f, e.alpha, inst.window), Md = maximal_dyadic(dil.f, e.alpha, dil.window);
    const auto If = integral_dyadic(inst.f, e.alpha, inst.window), Id = integral_dyadic(dil.f, e.alpha, dil.window);
    const double af = std::exp2(e.alpha);
    for (std::size_t c2 = 0; c2 < Mf.cell_count(); ++c2) {
      expect(Mf.value(c2), Md.value(c2), af);
      expect(If.value(c2), Id.value(c2), af);
    }
    expect(radon_morrey_norm(If, inst.mu, q, q0, cs).value, radon_morrey_norm(Id, dil.mu, q, q0, cd).value,
           std::exp2(n * (1.0 / q0 - 1.0 / q)) * af);
    ++r.cases;
    r.worst = std::max(r.worst, worst);
    if (!(worst <= 1e-12)) {
      ++r.failures;
      r.notes.push_back("instance " + std::to_string(i) + ": relative error " + format_double(worst));
    }
  }
  return r;
}

/// (sum g_i)^p <= sum g_i^p cellwise for p in (0, 1]; worst = smallest margin seen.
inline SuiteResult subadditivity_suite(std::uint64_t seed, int trials = 200) {
  SuiteResult r{"subadditivity", 0, 0, std::numeric_limits<double>::infinity(), {}};
  for (int i = 0; i < trials; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i), 7);
    const int n = 1 + i % 2;
    const int K = n == 1 ? 6 : 3;
    const int count = std::uniform_int_distribution<int>(1, 5)(rng);
    const double p = i == 0 ? 1.0 : uniform(rng, std::nextafter(0.0, 1.0), 1.0);
    std::vector<OperatorField> fields;
    for (int j = 0; j < count; ++j) {
      const VectorFunction f{suite_function(rng, n, K)};
      const auto w = LevelWindow::make(-1, K, unit_cube(n));
      fields.push_back(j % 2 ? integral_dyadic(f, uniform(rng, 0.1, 0.9) * n, w) : maximal_dyadic(f, 0.0, w));
    }
    const auto res = subadditivity_check(fields, p);
    ++r.cases;
    r.worst = std::min(r.worst, res.worst_margin);
    if (!res.holds) {
      ++r.failures;
      r.notes.push_back("trial " + std::to_string(i) + ": p = " + format_double(p) + ", margin " + format_double(res.worst_margin));
    }
  }
  return r;
}

/// Closed-form t* and bound against bisection on the branch gap, plus the
/// bracket bound <= numeric minimum <= 2 bound, over random (M, alpha, beta, p0, n).
inline SuiteResult hedberg_sweep(std::uint64_t seed, int points = 500) {
  SuiteResult r{"hedberg", 0, 0, 0.0, {}};
  for (int i = 0; i < points; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i), 8);
    ExponentSet e;
    e.n = 1 + i % 3;
    e.m = 2;
    e.p0 = uniform(rng, 1.0, 4.0);
    e.alpha = uniform(rng, 0.05, 0.95) * e.n / e.p0;
    e.beta = uniform(rng, 0.0, 0.95) * e.alpha;
    e.regime = Regime::integral_via_maximal;
    const double M = std::exp(uniform(rng, -8.0, 8.0));
    const auto opt = hedberg_optimal(M, e);
    const double t = numeric_crossing(M, e);
    const double crossing_value = M * std::pow(t, e.alpha - e.beta);
    const double minimum = numeric_minimum(M, e);
    const double err = std::max(rel_diff(opt.t_star, t), rel_diff(opt.bound, crossing_value));
    ++r.cases;
    r.worst = std::max(r.worst, err);
    const bool bracket = minimum >= opt.bound * (1.0 - 1e-9) && minimum <= 2.0 * opt.bound * (1.0 + 1e-9);
    if (!(err <= 1e-6) || !bracket) {
      ++r.failures;
      r.notes.push_back("point " + std::to_string(i) + ": relative error " + format_double(err) +
                        (bracket ? "" : ", minimum outside [bound, 2 bound]"));
    }
  }
  ExponentSet w;
  w.n = 1;
  w.m = 2;
  w.p0 = 1.2;
  w.alpha = 0.75;
  w.beta = 0.5;
  const double b = hedberg_optimal(16.0, w).bound;
  ++r.cases;
  if (!(rel_diff(b, 2.0) <= 1e-12)) {
    ++r.failures;
    r.notes.push_back("M = 16 worked point: bound " + format_double(b));
  }
  return r;
}

inline json suite_json(const SuiteResult& s) {
  return json{{"suite", s.name}, {"cases", s.cases}, {"failures", s.failures}, {"worst", s.worst}, {"notes", s.notes}};
}

}  // namespace morrey
