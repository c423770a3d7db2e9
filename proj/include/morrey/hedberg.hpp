#pragma once

// Exponent bookkeeping for the trace inequalities, the closed-form Hedberg
// optimisation of  t^{alpha-beta} M + t^{alpha-n/p0}, and the pointwise
// domination of the dyadic fractional integral by M_beta^{1/theta} (p > 1)
// or I_beta^{1/theta} (p <= 1).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"
#include "morrey/grid.hpp"
#include "morrey/norms.hpp"
#include "morrey/operators.hpp"

namespace morrey {

/// Which inequality an exponent tuple is checked against.
enum class Regime {
  integral_via_maximal,   // "thm1.1": I_alpha into M_mu^{q,q0}, 1 < p, beta < alpha
  integral_via_integral,  // "thm1.2": I_alpha into M_mu^{q,q0}, p <= 1, beta <= alpha
  maximal_trace,          // "thm2.1": M_alpha^D into M_mu^{p,p0}
  integral_trace,         // "thm2.2": I_alpha^D into M_mu^{p,p0}, p <= 1
};

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::integral_via_maximal: return "thm1.1";
    case Regime::integral_via_integral: return "thm1.2";
    case Regime::maximal_trace: return "thm2.1";
    case Regime::integral_trace: return "thm2.2";
  }
  return "?";
}

inline Regime parse_regime(const std::string& s) {
  for (auto r : {Regime::integral_via_maximal, Regime::integral_via_integral, Regime::maximal_trace,
                 Regime::integral_trace})
    if (regime_name(r) == s) return r;
  throw InvalidArgument("unknown regime '" + s + "' (expected thm1.1, thm1.2, thm2.1 or thm2.2)");
}

/// True when the regime bounds a fractional integral through a Hedberg step.
inline bool uses_hedberg(Regime r) { return r == Regime::integral_via_maximal || r == Regime::integral_via_integral; }

/// Exponents of one trace inequality. For the maximal/integral trace regimes
/// beta coincides with alpha, so theta = 1, q = p and q0 = p0.
struct ExponentSet {
  int n = 1;
  int m = 1;
  std::vector<double> exps;  // p_1..p_m
  double p = 0.0;            // 1/p = sum 1/p_j
  double p0 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double theta = 1.0;  // (n - beta p0) / (n - alpha p0)
  double q = 0.0;      // theta p
  double q0 = 0.0;     // theta p0
  Regime regime = Regime::maximal_trace;

  /// Growth index of the measure on the right-hand side: n - beta p.
  double growth_index() const { return n - beta * p; }
};

struct Violation {
  std::string hypothesis;
  std::string detail;
};

struct ExponentCheck {
  ExponentSet set;
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

inline ExponentCheck exponents(int n, int m, const std::vector<double>& exps, double p0, double alpha, double beta,
                               Regime regime) {
  ExponentCheck c;
  auto& e = c.set;
  e.n = n;
  e.m = m;
  e.exps = exps;
  e.p0 = p0;
  e.alpha = alpha;
  e.regime = regime;
  e.beta = uses_hedberg(regime) ? beta : alpha;
  auto fail = [&](std::string h, std::string d) { c.violations.push_back(Violation{std::move(h), std::move(d)}); };
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };

  if (n < 1) fail("n >= 1", "n = " + std::to_string(n));
  if (m < 1) fail("m >= 1", "m = " + std::to_string(m));
  if (static_cast<int>(exps.size()) != m)
    fail("one exponent per component", std::to_string(exps.size()) + " exponents for m = " + std::to_string(m));
  double inv_p = 0.0;
  for (std::size_t j = 0; j < exps.size(); ++j) {
    if (!(exps[j] > 1.0) || !std::isfinite(exps[j]))
      fail("p_j in (1, inf)", "p_" + std::to_string(j + 1) + " = " + num(exps[j]));
    inv_p += 1.0 / exps[j];
  }
  e.p = 1.0 / inv_p;
  const double mn = static_cast<double>(m) * n;

  if (!(e.p <= p0)) fail("p <= p0", "p = " + num(e.p) + ", p0 = " + num(p0));
  if (!(alpha > 0.0)) fail("0 < alpha", "alpha = " + num(alpha));
  if (!(alpha < mn)) fail("alpha < mn", "alpha = " + num(alpha) + ", mn = " + num(mn));
  if (!(alpha * p0 < n)) fail("p0 < n/alpha", "p0 = " + num(p0) + ", n/alpha = " + num(n / alpha));

  switch (regime) {
    case Regime::integral_via_maximal:
      if (!(e.p > 1.0)) fail("1 < p", "p = " + num(e.p));
      if (!(beta > 0.0)) fail("0 < beta", "beta = " + num(beta));
      if (!(beta < alpha)) fail("beta < alpha", "beta = " + num(beta) + ", alpha = " + num(alpha));
      break;
    case Regime::integral_via_integral:
      if (!(e.p <= 1.0)) fail("0 < p <= 1", "p = " + num(e.p));
      if (!(beta > 0.0)) fail("0 < beta", "beta = " + num(beta));
      if (!(beta <= alpha)) fail("beta <= alpha", "beta = " + num(beta) + ", alpha = " + num(alpha));
      break;
    case Regime::maximal_trace:
      break;
    case Regime::integral_trace:
      if (!(e.p <= 1.0)) fail("0 < p <= 1", "p = " + num(e.p));
      break;
  }

  e.theta = (n - e.beta * p0) / (n - alpha * p0);
  e.q = e.theta * e.p;
  e.q0 = e.theta * p0;
  if (c.valid()) {
    // Consequences of the hypotheses; reported if rounding ever breaks them.
    if (!(e.theta >= 1.0)) fail("theta >= 1", "theta = " + num(e.theta));
    if (!(e.q <= e.q0)) fail("q <= q0", "q = " + num(e.q) + ", q0 = " + num(e.q0));
    if (!(e.growth_index() > 0.0)) fail("n - beta p > 0", "n - beta p = " + num(e.growth_index()));
  }
  return c;
}

/// Validated exponents or InvalidExponent naming every violated hypothesis.
inline ExponentSet require_exponents(int n, int m, const std::vector<double>& exps, double p0, double alpha,
                                     double beta, Regime regime) {
  auto c = exponents(n, m, exps, p0, alpha, beta, regime);
  if (!c.valid()) {
    std::string msg = "exponent hypotheses of " + regime_name(regime) + " violated:";
    for (const auto& v : c.violations) msg += " [" + v.hypothesis + ": " + v.detail + "]";
    throw InvalidExponent(msg);
  }
  return c.set;
}

struct HedbergOptimum {
  double t_star = 0.0;  // where t^{alpha-beta} M = t^{alpha-n/p0}
  double bound = 0.0;   // common value there: M^{1/theta}
};

namespace detail {
inline void check_crossing(double M, const ExponentSet& e) {
  if (!(M >= 0.0) || !std::isfinite(M)) throw InvalidArgument("Hedberg optimisation needs a finite M >= 0");
  if (!(e.beta * e.p0 < e.n))
    throw InvalidExponent("branches t^{alpha-beta} M and t^{alpha-n/p0} do not cross unless beta < n/p0");
  if (!(e.alpha * e.p0 < e.n)) throw InvalidExponent("Hedberg optimisation needs alpha < n/p0");
}
}  // namespace detail

/// t* = M^{-p0/(n - beta p0)},  bound = M^{(n - alpha p0)/(n - beta p0)}.
/// For M = 0 the infimum 0 is approached as t -> inf.
inline HedbergOptimum hedberg_optimal(double M, const ExponentSet& e) {
  detail::check_crossing(M, e);
  if (M == 0.0) return HedbergOptimum{std::numeric_limits<double>::infinity(), 0.0};
  const double denom = e.n - e.beta * e.p0;
  return HedbergOptimum{std::pow(M, -e.p0 / denom), std::pow(M, (e.n - e.alpha * e.p0) / denom)};
}

/// Crossing of the two branches found by bracketing and bisection in log t.
inline double numeric_crossing(double M, const ExponentSet& e) {
  detail::check_crossing(M, e);
  if (M == 0.0) return std::numeric_limits<double>::infinity();
  const double a = e.alpha - e.beta, b = e.alpha - e.n / e.p0;
  auto gap = [&](double s) { return std::exp(a * s) * M - std::exp(b * s); };
  double lo = -1.0, hi = 1.0;
  while (gap(lo) > 0.0) lo *= 2.0;
  while (gap(hi) < 0.0) hi *= 2.0;
  auto [l, r] = boost::math::tools::bisect(gap, lo, hi, boost::math::tools::eps_tolerance<double>(52));
  return std::exp(0.5 * (l + r));
}

/// Minimum of t^{alpha-beta} M + t^{alpha-n/p0} over t > 0 (Brent on log t around the crossing).
/// Always lies in [bound, 2 bound].
inline double numeric_minimum(double M, const ExponentSet& e) {
  detail::check_crossing(M, e);
  if (M == 0.0) return 0.0;
  const double a = e.alpha - e.beta, b = e.alpha - e.n / e.p0;
  const double s0 = std::log(hedberg_optimal(M, e).t_star);
  auto sum = [&](double s) { return std::exp(a * s) * M + std::exp(b * s); };
  const double width = 40.0 / std::min(e.n / e.p0 - e.alpha, 1.0);
  auto r = boost::math::tools::brent_find_minima(sum, s0 - width, s0 + width, 52);
  return r.second;
}

struct TelescopingSplit {
  double inner = 0.0;  // cubes R ⊆ Q in the chain of x, including the sub-cell tail
  double outer = 0.0;  // cubes R ⊋ Q, including the ancestor tail
};

inline TelescopingSplit telescoping_split(const VectorFunction& f, double alpha, const DyadicCube& q,
                                          std::span<const double> x, const LevelWindow& window) {
  if (!q.contains(x)) throw InvalidArgument("telescoping split needs x in Q");
  if (q.level < window.k_min || q.level > window.k_max) throw InvalidArgument("splitting cube outside the window");
  const auto chain = integral_chain(f, alpha, x, window);
  TelescopingSplit s;
  s.outer = chain.ancestor_tail;
  const std::size_t split = static_cast<std::size_t>(q.level - window.k_min);
  for (std::size_t i = 0; i < chain.level_terms.size(); ++i) (i < split ? s.outer : s.inner) += chain.level_terms[i];
  s.inner += chain.fine_tail;
  return s;
}

/// f_j / N^{1/m} with N the product Morrey norm over the dyadic cubes of the window.
inline VectorFunction normalize_product_morrey(const VectorFunction& f, const ExponentSet& e,
                                               const LevelWindow& window, double* norm_out = nullptr) {
  const double norm = product_morrey_norm(f, e.exps, e.p0, CubeSet::dyadic(window)).value;
  if (!(norm > 0.0)) throw InvalidArgument("cannot normalise a vector function with zero product Morrey norm");
  if (norm_out) *norm_out = norm;
  const double c = std::pow(norm, -1.0 / f.m());
  std::vector<GridFunction> out;
  for (const auto& g : f.components()) out.push_back(scaled(g, c));
  return VectorFunction(std::move(out));
}

struct HedbergBound {
  VectorFunction normalized;
  double norm = 0.0;           // product Morrey norm before normalisation
  OperatorField dominating;    // M_beta^{1/theta} or I_beta^{1/theta} of the normalised input
};

inline HedbergBound hedberg_pointwise_bound(const VectorFunction& f, const ExponentSet& e, const LevelWindow& window) {
  if (!uses_hedberg(e.regime)) throw InvalidArgument("pointwise Hedberg bound needs regime thm1.1 or thm1.2");
  HedbergBound h;
  h.normalized = normalize_product_morrey(f, e, window, &h.norm);
  const OperatorField base = e.regime == Regime::integral_via_maximal ? maximal_dyadic(h.normalized, e.beta, window)
                                                                      : integral_dyadic(h.normalized, e.beta, window);
  std::vector<double> v(base.values().begin(), base.values().end());
  for (double& x : v) x = std::pow(x, 1.0 / e.theta);
  h.dominating = OperatorField(GridFunction(base.root(), base.finest_level(), std::move(v)));
  return h;
}

struct RatioSummary {
  double sup = 0.0;
  double median = 0.0;
  double min = 0.0;
  std::size_t infinite_cells = 0;
  OperatorField ratio;
};

/// Cellwise I_alpha(f~) / dominating field, with f~ normalised to unit product Morrey norm.
inline RatioSummary hedberg_ratio(const VectorFunction& f, const ExponentSet& e, const LevelWindow& window) {
  const auto h = hedberg_pointwise_bound(f, e, window);
  const auto lhs = integral_dyadic(h.normalized, e.alpha, window);
  std::vector<double> r(lhs.cell_count());
  RatioSummary s;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double a = lhs.value(i), b = h.dominating.value(i);
    if (a == 0.0)
      r[i] = 0.0;
    else if (b == 0.0) {
      r[i] = std::numeric_limits<double>::infinity();
      ++s.infinite_cells;
    } else
      r[i] = a / b;
  }
  std::vector<double> sorted = r;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.sup = sorted.back();
  const std::size_t k = sorted.size();
  s.median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  s.ratio = OperatorField(GridFunction(lhs.root(), lhs.finest_level(), std::move(r)));
  return s;
}

struct TelescopingConstants {
  double inner = 0.0;  // sup inner / (l_Q^{alpha-beta} * local(x))
  double outer = 0.0;  // sup outer / l_Q^{alpha-n/p0}
};

/// Measured constants of the two telescoping estimates over every cell x and
/// every chain cube Q between the root and the finest level. `local` is M_beta
/// (thm1.1) or I_beta (thm1.2) of the normalised input.
inline TelescopingConstants telescoping_constants(const VectorFunction& normalized, const ExponentSet& e,
                                                  const LevelWindow& window) {
  const OperatorField local = e.regime == Regime::integral_via_maximal
                                  ? maximal_dyadic(normalized, e.beta, window)
                                  : integral_dyadic(normalized, e.beta, window);
  TelescopingConstants c;
  const GridFunction& lat = normalized[0];
  for (std::size_t i = 0; i < lat.cell_count(); ++i) {
    const auto x = lat.cell(i).center();
    const auto chain = integral_chain(normalized, e.alpha, x, window);
    double outer = chain.ancestor_tail;
    for (int k = window.k_min; k < lat.root().level; ++k) outer += chain.level_terms[static_cast<std::size_t>(k - window.k_min)];
    for (int k = lat.root().level; k <= lat.finest_level(); ++k) {
      double inner = chain.fine_tail;
      for (int r = k; r <= lat.finest_level(); ++r) inner += chain.level_terms[static_cast<std::size_t>(r - window.k_min)];
      const double l = std::ldexp(1.0, -k);
      const double in_scale = std::pow(l, e.alpha - e.beta) * local.value(i);
      if (inner > 0.0)
        c.inner = std::max(c.inner, in_scale > 0.0 ? inner / in_scale : std::numeric_limits<double>::infinity());
      c.outer = std::max(c.outer, outer / std::pow(l, e.alpha - e.n / e.p0));
      outer += chain.level_terms[static_cast<std::size_t>(k - window.k_min)];
    }
  }
  return c;
}

}  // namespace morrey
