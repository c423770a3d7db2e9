#pragma once

// Dyadic m-linear fractional maximal and integral operators, the dyadic
// Hardy–Littlewood maximal function, and a midpoint-rule evaluation of the
// continuous m-linear fractional integral.
//
// A cube Q at level k contributes
//     term(Q) = l_Q^{alpha - mn} * prod_j ∫_Q |f_j|,   l_Q = 2^{-k}.
// Levels coarser than the root only see the ancestor chain of the root, whose
// integrals are the totals ||f_j||_1; levels finer than K see cellwise
// constants, where term(Q) = l_Q^alpha * prod_j v_j. Both tails are geometric.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"
#include "morrey/grid.hpp"

namespace morrey {

/// Operator output sampled at the finest cells; dyadic operators are cellwise
/// constant at that level.
class OperatorField {
 public:
  OperatorField() = default;
  explicit OperatorField(GridFunction values) : grid_(std::move(values)) {}

  const GridFunction& grid() const { return grid_; }
  const DyadicCube& root() const { return grid_.root(); }
  int finest_level() const { return grid_.finest_level(); }
  int dim() const { return grid_.dim(); }
  std::span<const double> values() const { return grid_.values(); }
  std::size_t cell_count() const { return grid_.cell_count(); }
  double value(std::size_t i) const { return grid_.value(i); }
  double value_at(std::span<const double> x) const { return grid_.value_at(x); }

 private:
  GridFunction grid_;
};

namespace detail {

inline void check_window(const VectorFunction& f, const LevelWindow& w) {
  if (w.root != f.root()) throw InvalidArgument("window root must be the root of the input lattice");
  if (w.k_max != f.finest_level()) throw InvalidArgument("window k_max must equal the finest level of the input");
}

/// 1 - 2^{-s} without cancellation for small s.
inline double one_minus_pow2(double s) { return -std::expm1(-s * std::log(2.0)); }

/// Sum over levels k <= k_last of 2^{k * s}, s > 0.
inline double coarse_tail(int k_last, double s) { return std::exp2(k_last * s) / one_minus_pow2(s); }

/// Sum over levels k >= k_first of 2^{-k * a}, a > 0.
inline double fine_tail(int k_first, double a) { return std::exp2(-k_first * a) / one_minus_pow2(a); }

/// Linear index of the parent of cell `lin` at relative depth d (d >= 1).
inline std::size_t parent_linear(std::size_t lin, int n, int d) {
  const std::int64_t side = std::int64_t{1} << d;
  const std::int64_t half = side >> 1;
  auto rest = static_cast<std::int64_t>(lin);
  std::int64_t plin = 0, mult = 1;
  for (int a = n - 1; a >= 0; --a) {
    plin += ((rest % side) >> 1) * mult;
    rest /= side;
    mult *= half;
  }
  return static_cast<std::size_t>(plin);
}

struct Pyramids {
  std::vector<LevelSums> sums;  // of |f_j|
  double cell_volume;
  int mn;

  explicit Pyramids(const VectorFunction& f) : cell_volume(f[0].cell_volume()), mn(f.m() * f.dim()) {
    for (const auto& g : f.components()) sums.emplace_back(g, [](double v) { return std::fabs(v); });
  }

  double product_total() const {
    double p = 1.0;
    for (const auto& s : sums) p *= s.total() * cell_volume;
    return p;
  }
};

/// l^{alpha-mn} at level k.
inline double level_weight(int k, int mn, double alpha) { return std::exp2(k * (mn - alpha)); }

/// Per-level arrays of cube terms for levels root..K.
inline std::vector<std::vector<double>> level_terms(const Pyramids& p, const VectorFunction& f, double alpha) {
  const int k0 = f.root().level;
  std::vector<std::vector<double>> out;
  for (int k = k0; k <= f.finest_level(); ++k) {
    const double w = level_weight(k, p.mn, alpha);
    std::vector<double> t(p.sums[0].level(k).size(), w);
    for (const auto& s : p.sums) {
      auto lvl = s.level(k);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] *= lvl[i] * p.cell_volume;
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

/// sup over dyadic Q ∋ x of l_Q^{alpha-mn} prod_j ∫_Q |f_j|, evaluated at the finest cells.
/// Ancestor contributions decrease with l_Q and sub-cell ones increase, so the
/// sup over levels [k_min, K] with k_min <= level(root) is the full dyadic sup.
inline OperatorField maximal_dyadic(const VectorFunction& f, double alpha, const LevelWindow& window) {
  detail::check_window(f, window);
  const int mn = f.m() * f.dim();
  if (!(alpha >= 0.0 && alpha < mn))
    throw InvalidExponent("maximal operator requires 0 <= alpha < mn, got alpha = " + std::to_string(alpha));
  const detail::Pyramids p(f);
  const int k0 = f.root().level;
  const int n = f.dim();

  double anc = 0.0;
  for (int k = window.k_min; k < k0; ++k) anc = std::max(anc, detail::level_weight(k, mn, alpha) * p.product_total());

  auto terms = detail::level_terms(p, f, alpha);
  std::vector<double> best{std::max(anc, terms[0][0])};
  for (std::size_t d = 1; d < terms.size(); ++d) {
    std::vector<double> next(terms[d].size());
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = std::max(best[detail::parent_linear(i, n, static_cast<int>(d))], terms[d][i]);
    best = std::move(next);
  }
  return OperatorField(GridFunction(f.root(), f.finest_level(), std::move(best)));
}

/// The full infinite dyadic sum  sum_{Q ∋ x} l_Q^{alpha-mn} prod_j ∫_Q f_j, with
/// both the ancestor tail below k_min and the sub-cell tail beyond K in closed form.
inline OperatorField integral_dyadic(const VectorFunction& f, double alpha, const LevelWindow& window) {
  detail::check_window(f, window);
  const int mn = f.m() * f.dim();
  if (!(alpha > 0.0 && alpha < mn))
    throw InvalidExponent("fractional integral requires 0 < alpha < mn, got alpha = " + std::to_string(alpha));
  if (!is_nonnegative(f)) throw InvalidArgument("dyadic fractional integral requires nonnegative inputs");
  const detail::Pyramids p(f);
  const int k0 = f.root().level;
  const int K = f.finest_level();
  const int n = f.dim();

  const double total = p.product_total();
  double acc = total * detail::coarse_tail(window.k_min - 1, mn - alpha);
  for (int k = window.k_min; k < k0; ++k) acc += detail::level_weight(k, mn, alpha) * total;

  auto terms = detail::level_terms(p, f, alpha);
  std::vector<double> sum{acc + terms[0][0]};
  for (std::size_t d = 1; d < terms.size(); ++d) {
    std::vector<double> next(terms[d].size());
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = sum[detail::parent_linear(i, n, static_cast<int>(d))] + terms[d][i];
    sum = std::move(next);
  }
  const double tail = detail::fine_tail(K + 1, alpha);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    double prod = 1.0;
    for (const auto& g : f.components()) prod *= g.value(i);
    sum[i] += prod * tail;
  }
  return OperatorField(GridFunction(f.root(), K, std::move(sum)));
}

/// Dyadic Hardy–Littlewood maximal function of |f|.
inline OperatorField hl_maximal_dyadic(const GridFunction& f, const LevelWindow& window) {
  return maximal_dyadic(VectorFunction{absolute(f)}, 0.0, window);
}

/// Chain of the dyadic fractional integral at one point, split by level.
struct IntegralChain {
  int k_min = 0;
  std::vector<double> level_terms;  // levels k_min..K
  double ancestor_tail = 0.0;       // levels < k_min
  double fine_tail = 0.0;           // levels > K
};

inline IntegralChain integral_chain(const VectorFunction& f, double alpha, std::span<const double> x,
                                    const LevelWindow& window) {
  detail::check_window(f, window);
  const int mn = f.m() * f.dim();
  if (!(alpha > 0.0 && alpha < mn)) throw InvalidExponent("fractional integral requires 0 < alpha < mn");
  if (!f.root().contains(x)) throw OutOfWindow("point lies outside the input root");
  const detail::Pyramids p(f);
  IntegralChain c;
  c.k_min = window.k_min;
  c.ancestor_tail = p.product_total() * detail::coarse_tail(window.k_min - 1, mn - alpha);
  for (const auto& q : cubes_containing(x, window)) {
    double t = detail::level_weight(q.level, mn, alpha);
    for (const auto& s : p.sums) t *= s.sum(q) * p.cell_volume;
    c.level_terms.push_back(t);
  }
  double prod = 1.0;
  for (const auto& g : f.components()) prod *= g.value_at(x);
  c.fine_tail = prod * detail::fine_tail(f.finest_level() + 1, alpha);
  return c;
}

struct ContinuousQuadrature {
  double value = 0.0;
  /// Volume in (R^n)^m of the omitted diagonal tuple (every y_j in the cell of x).
  /// The omission can only lower the value.
  double omitted_volume = 0.0;
};

/// Midpoint rule for ∫ prod f_j(y_j) / (sum_j |x - y_j|)^{mn - alpha} dy over all
/// m-tuples of finest cells, excluding the singular diagonal tuple.
inline ContinuousQuadrature integral_continuous(const VectorFunction& f, double alpha, std::span<const double> x,
                                                double max_tuples = 1e8) {
  const int n = f.dim();
  const int m = f.m();
  const int mn = m * n;
  if (!(alpha > 0.0 && alpha < mn)) throw InvalidExponent("fractional integral requires 0 < alpha < mn");
  if (static_cast<int>(x.size()) != n) throw InvalidArgument("point dimension mismatch");
  if (!f.root().contains(x)) throw OutOfWindow("evaluation point lies outside the input root");
  const GridFunction& g0 = f[0];
  const auto own = cube_containing(x, f.finest_level());
  if (own.center() != std::vector<double>(x.begin(), x.end()))
    throw InvalidArgument("continuous quadrature is evaluated at finest-cell centers");
  const double cells = static_cast<double>(g0.cell_count());
  if (std::pow(cells, m) > max_tuples)
    throw CostGuard("quadrature needs " + std::to_string(std::pow(cells, m)) + " cell tuples, limit " +
                    std::to_string(max_tuples));

  const std::size_t count = g0.cell_count();
  const std::size_t own_lin = g0.linear_index(own);
  std::vector<double> dist(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto c = g0.cell(i).center();
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      const double d = c[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(a)];
      s += d * d;
    }
    dist[i] = std::sqrt(s);
  }
  const double cv = g0.cell_volume();
  const double expo = alpha - mn;

  std::vector<std::size_t> tuple(static_cast<std::size_t>(m), 0);
  double total = 0.0;
  while (true) {
    bool diagonal = true;
    double prod = 1.0, r = 0.0;
    for (int j = 0; j < m; ++j) {
      const std::size_t c = tuple[static_cast<std::size_t>(j)];
      diagonal = diagonal && c == own_lin;
      prod *= f[j].value(c) * cv;
      r += dist[c];
    }
    if (!diagonal && prod != 0.0) total += prod * std::pow(r, expo);
    int j = m - 1;
    while (j >= 0 && ++tuple[static_cast<std::size_t>(j)] == count) tuple[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
  }
  return ContinuousQuadrature{total, std::pow(cv, m)};
}

/// sup over cells of lhs/rhs; +inf when rhs vanishes where lhs does not.
inline double domination_constant(const OperatorField& lhs, const OperatorField& rhs) {
  double c = 0.0;
  for (std::size_t i = 0; i < lhs.cell_count(); ++i) {
    const double a = lhs.value(i), b = rhs.value(i);
    if (a == 0.0) continue;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    c = std::max(c, a / b);
  }
  return c;
}

}  // namespace morrey
