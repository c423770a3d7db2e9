#pragma once

// Morrey, product Morrey, Radon–Morrey and measure-growth norms as maxima over
// a finite cube set. Each norm reports the cube attaining the maximum.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"
#include "morrey/grid.hpp"
#include "morrey/operators.hpp"

namespace morrey {

enum class CubeSetMode { dyadic, dyadic_plus_shifts };

inline std::string to_string(CubeSetMode m) { return m == CubeSetMode::dyadic ? "dyadic" : "dyadic-plus-shifts"; }

inline CubeSetMode parse_cube_set_mode(const std::string& s) {
  if (s == "dyadic" || s == "dyadic-only") return CubeSetMode::dyadic;
  if (s == "dyadic-plus-shifts" || s == "shifts") return CubeSetMode::dyadic_plus_shifts;
  throw InvalidArgument("unknown cube-set mode '" + s + "'");
}

/// A dyadic cube optionally translated by half its side along some axes.
/// A shifted cube at level k is the union of 2^n level-(k+1) dyadic cubes.
struct QueryCube {
  DyadicCube base;
  IndexVec shift;  // 0 or 1 per axis, in units of half a side

  static QueryCube plain(const DyadicCube& q) { return QueryCube{q, IndexVec(q.dim(), 0)}; }

  bool shifted() const {
    for (auto s : shift)
      if (s != 0) return true;
    return false;
  }
  int level() const { return base.level; }
  double side() const { return base.side(); }
  double volume() const { return base.volume(); }

  std::vector<DyadicCube> pieces() const {
    if (!shifted()) return {base};
    const int n = base.dim();
    std::vector<DyadicCube> out;
    for (unsigned e = 0; e < (1u << n); ++e) {
      DyadicCube c{base.level + 1, IndexVec(n)};
      for (int a = 0; a < n; ++a)
        c.index[a] = 2 * base.index[a] + shift[a] + static_cast<std::int64_t>((e >> (n - 1 - a)) & 1u);
      out.push_back(c);
    }
    return out;
  }

  friend bool operator==(const QueryCube&, const QueryCube&) = default;
};

/// Witness order: larger cube first, unshifted before shifted, then lexicographic.
inline bool precedes(const QueryCube& a, const QueryCube& b) {
  if (a.base.level != b.base.level) return a.base.level < b.base.level;
  if (a.shift != b.shift) return a.shift < b.shift;
  return a.base.index < b.base.index;
}

/// The cubes over which a norm supremum is taken: every cube meeting the window
/// root at levels [k_min, k_max], plus half-shifted copies at levels < k_max
/// when requested (their pieces then stay at or above k_max).
struct CubeSet {
  CubeSetMode mode = CubeSetMode::dyadic;
  LevelWindow window;

  static CubeSet dyadic(const LevelWindow& w) { return CubeSet{CubeSetMode::dyadic, w}; }
  static CubeSet with_shifts(const LevelWindow& w) { return CubeSet{CubeSetMode::dyadic_plus_shifts, w}; }

  /// Translation vectors, in half-side units, applied at each level.
  std::vector<IndexVec> shifts() const {
    const int n = window.root.dim();
    std::vector<IndexVec> out;
    const unsigned count = mode == CubeSetMode::dyadic ? 1u : (1u << n);
    for (unsigned s = 0; s < count; ++s) {
      IndexVec v(n);
      for (int a = 0; a < n; ++a) v[a] = (s >> (n - 1 - a)) & 1u;
      out.push_back(v);
    }
    return out;
  }

  std::vector<QueryCube> members() const {
    const DyadicCube& root = window.root;
    const int n = root.dim();
    const int k0 = root.level;
    std::vector<QueryCube> out;
    for (int k = window.k_min; k <= window.k_max; ++k) {
      if (k >= k0)
        for_each_at_level(root, k, [&](const DyadicCube& q) { out.push_back(QueryCube::plain(q)); });
      else
        out.push_back(QueryCube::plain(ancestor(root, k)));
      if (mode == CubeSetMode::dyadic || k >= window.k_max) continue;

      // Root extent in level-(k+1) units; a shifted cube spans [L, L+2) there.
      const int u = k + 1;
      std::vector<std::int64_t> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) {
        if (u >= k0) {
          lo[a] = root.index[a] << (u - k0);
          hi[a] = lo[a] + (std::int64_t{1} << (u - k0));
        } else {
          lo[a] = root.index[a] >> (k0 - u);
          hi[a] = lo[a] + 1;
        }
      }
      for (const auto& s : shifts()) {
        bool any = false;
        for (auto c : s) any = any || c != 0;
        if (!any) continue;
        // Per axis, corners L in (lo - 2, hi) with L ≡ s (mod 2).
        std::vector<std::vector<std::int64_t>> axis(static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a)
          for (std::int64_t L = lo[a] - 1; L < hi[a]; ++L)
            if (((L - s[a]) & 1) == 0) axis[a].push_back((L - s[a]) >> 1);
        std::vector<std::size_t> pos(static_cast<std::size_t>(n), 0);
        while (true) {
          QueryCube qc{DyadicCube{k, IndexVec(n)}, s};
          for (int a = 0; a < n; ++a) qc.base.index[a] = axis[a][pos[a]];
          out.push_back(qc);
          int a = n - 1;
          while (a >= 0 && ++pos[a] == axis[a].size()) pos[a--] = 0;
          if (a < 0) break;
        }
      }
    }
    return out;
  }
};

struct NormResult {
  double value = 0.0;
  QueryCube witness;
  CubeSetMode mode = CubeSetMode::dyadic;
};

namespace detail {

template <class Value>
NormResult argmax(const CubeSet& cubes, Value&& value_of) {
  NormResult r;
  r.mode = cubes.mode;
  bool first = true;
  for (const auto& q : cubes.members()) {
    const double v = value_of(q);
    if (first || v > r.value || (v == r.value && precedes(q, r.witness))) {
      r.value = v;
      r.witness = q;
      first = false;
    }
  }
  return r;
}

template <class Sums>
double sum_pieces(const Sums& s, const QueryCube& q) {
  if (!q.shifted()) return s.sum(q.base);
  double t = 0.0;
  for (const auto& c : q.pieces()) t += s.sum(c);
  return t;
}

inline void check_lattice(const CubeSet& cubes, int dim, int finest, const char* what) {
  if (cubes.window.root.dim() != dim) throw InvalidArgument("cube set dimension mismatch");
  if (cubes.window.k_max > finest) throw SubResolution(std::string("cube set reaches below the resolution of the ") + what);
}

inline std::vector<std::pair<IndexVec, double>> atoms_inside(const AtomicMeasure& mu, const DyadicCube& root,
                                                             const std::function<double(const Atom&)>& weight) {
  std::vector<std::pair<IndexVec, double>> out;
  for (const auto& a : mu.atoms()) {
    const auto c = mu.cell(a);
    const bool inside = c.level >= root.level ? root.contains(c) : root.contains(std::span<const double>(c.center()));
    if (!inside) throw InvalidArgument("atom at " + to_string(c) + " lies outside the cube-set root");
    out.emplace_back(a.cell, weight(a));
  }
  return out;
}

}  // namespace detail

/// ||f||_{L^p(Q)} = (∫_Q |f|^p)^{1/p}
inline double lp_norm_on_cube(const GridFunction& f, double p, const DyadicCube& q) {
  if (!(p > 0.0)) throw InvalidExponent("L^p norm requires p > 0");
  if (q.level > f.finest_level()) throw SubResolution("L^p cube is finer than the grid");
  double s = 0.0;
  if (q.level <= f.root().level) {
    if (q.contains(f.root()))
      for (double v : f.values()) s += std::pow(std::fabs(v), p);
  } else if (f.root().contains(q)) {
    for_each_at_level(q, f.finest_level(),
                      [&](const DyadicCube& c) { s += std::pow(std::fabs(f.value(f.linear_index(c))), p); });
  }
  return std::pow(s * f.cell_volume(), 1.0 / p);
}

/// sup_Q |Q|^{1/p0 - 1/p} ||f||_{L^p(Q)}
inline NormResult morrey_norm(const GridFunction& f, double p, double p0, const CubeSet& cubes) {
  if (!(p > 0.0) || !(p <= p0) || !std::isfinite(p0)) throw InvalidExponent("Morrey norm requires 0 < p <= p0 < inf");
  detail::check_lattice(cubes, f.dim(), f.finest_level(), "grid function");
  const LevelSums sums(f, [p](double v) { return std::pow(std::fabs(v), p); });
  const double cv = f.cell_volume();
  const double e = 1.0 / p0 - 1.0 / p;
  return detail::argmax(cubes, [&](const QueryCube& q) {
    return std::pow(q.volume(), e) * std::pow(detail::sum_pieces(sums, q) * cv, 1.0 / p);
  });
}

/// sup_Q |Q|^{1/p0 - 1/p} prod_j ||f_j||_{L^{p_j}(Q)},  1/p = sum_j 1/p_j.
inline NormResult product_morrey_norm(const VectorFunction& f, const std::vector<double>& exps, double p0,
                                      const CubeSet& cubes) {
  if (static_cast<int>(exps.size()) != f.m()) throw InvalidExponent("need one exponent per component");
  double inv_p = 0.0;
  for (double pj : exps) {
    if (!(pj > 1.0) || !std::isfinite(pj)) throw InvalidExponent("product Morrey exponents must lie in (1, inf)");
    inv_p += 1.0 / pj;
  }
  if (!(1.0 / inv_p <= p0) || !std::isfinite(p0)) throw InvalidExponent("product Morrey norm requires p <= p0 < inf");
  detail::check_lattice(cubes, f.dim(), f.finest_level(), "grid function");
  std::vector<LevelSums> sums;
  for (int j = 0; j < f.m(); ++j) {
    const double pj = exps[static_cast<std::size_t>(j)];
    sums.emplace_back(f[j], [pj](double v) { return std::pow(std::fabs(v), pj); });
  }
  const double cv = f[0].cell_volume();
  const double e = 1.0 / p0 - inv_p;
  return detail::argmax(cubes, [&](const QueryCube& q) {
    double v = std::pow(q.volume(), e);
    for (std::size_t j = 0; j < sums.size(); ++j) v *= std::pow(detail::sum_pieces(sums[j], q) * cv, 1.0 / exps[j]);
    return v;
  });
}

/// sup_Q |Q|^{1/q0 - 1/q} (∫_Q |g|^q dmu)^{1/q}, with g read at each atom's cell.
inline NormResult radon_morrey_norm(const OperatorField& g, const AtomicMeasure& mu, double q, double q0,
                                    const CubeSet& cubes) {
  if (!(q > 0.0) || !(q <= q0) || !std::isfinite(q0))
    throw InvalidExponent("Radon-Morrey norm requires 0 < q <= q0 < inf");
  if (mu.dim() != g.dim()) throw InvalidArgument("measure and field dimensions differ");
  detail::check_lattice(cubes, mu.dim(), mu.resolution(), "measure");
  auto entries = detail::atoms_inside(mu, g.root(), [&](const Atom& a) {
    return a.mass * std::pow(std::fabs(g.value_at(mu.point(a))), q);
  });
  const SparseLevelSums sums(mu.resolution(), cubes.window.k_min, entries);
  const double e = 1.0 / q0 - 1.0 / q;
  return detail::argmax(cubes, [&](const QueryCube& c) {
    return std::pow(c.volume(), e) * std::pow(detail::sum_pieces(sums, c), 1.0 / q);
  });
}

/// ||mu||_beta = sup_Q mu(Q) / l_Q^beta over cubes at or above the atom resolution.
inline NormResult measure_growth_norm(const AtomicMeasure& mu, double beta, const CubeSet& cubes) {
  if (!(beta > 0.0)) throw InvalidExponent("measure growth exponent must be positive");
  detail::check_lattice(cubes, mu.dim(), mu.resolution(), "measure");
  auto entries = detail::atoms_inside(mu, cubes.window.root, [](const Atom& a) { return a.mass; });
  const SparseLevelSums sums(mu.resolution(), cubes.window.k_min, entries);
  return detail::argmax(cubes,
                        [&](const QueryCube& c) { return detail::sum_pieces(sums, c) / std::pow(c.side(), beta); });
}

}  // namespace morrey
