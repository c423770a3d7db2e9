#pragma once

// Enumerate-all reference implementations. They share nothing with the
// library's pyramids: every cube is visited, every integral is a full cell
// scan with coordinate containment, every measure a full atom scan.

#include <cmath>
#include <vector>

#include "morrey/morrey.hpp"

namespace oracle {

using namespace morrey;

/// Every window cube meeting the root: ancestors above it, sub-cubes at or below.
inline std::vector<DyadicCube> all_cubes(const LevelWindow& w) {
  std::vector<DyadicCube> out;
  for (int k = w.k_min; k <= w.k_max; ++k) {
    if (k < w.root.level) {
      out.push_back(cube_containing(w.root.center(), k));
      continue;
    }
    const std::int64_t side = std::int64_t{1} << (k - w.root.level);
    const int n = w.root.dim();
    std::vector<std::int64_t> pos(static_cast<std::size_t>(n), 0);
    for (;;) {
      DyadicCube q{k, IndexVec(n)};
      for (int a = 0; a < n; ++a) q.index[a] = w.root.index[a] * side + pos[static_cast<std::size_t>(a)];
      out.push_back(q);
      int a = n - 1;
      while (a >= 0 && ++pos[static_cast<std::size_t>(a)] == side) pos[static_cast<std::size_t>(a--)] = 0;
      if (a < 0) break;
    }
  }
  return out;
}

/// ∫_Q |f|^p over cells whose center lies in Q.
inline double lp_power(const GridFunction& f, double p, const DyadicCube& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.cell_count(); ++i)
    if (q.contains(f.cell(i).center())) s += std::pow(std::abs(f.value(i)), p) * f.cell_volume();
  return s;
}

inline double integral(const GridFunction& f, const DyadicCube& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.cell_count(); ++i)
    if (q.contains(f.cell(i).center())) s += f.value(i) * f.cell_volume();
  return s;
}

inline double morrey(const GridFunction& f, double p, double p0, const LevelWindow& w) {
  double best = 0.0;
  for (const auto& q : all_cubes(w))
    best = std::max(best, std::pow(q.volume(), 1.0 / p0 - 1.0 / p) * std::pow(lp_power(f, p, q), 1.0 / p));
  return best;
}

inline double product_morrey(const VectorFunction& f, const std::vector<double>& P, double p0, const LevelWindow& w) {
  double inv_p = 0.0;
  for (double pj : P) inv_p += 1.0 / pj;
  double best = 0.0;
  for (const auto& q : all_cubes(w)) {
    double v = std::pow(q.volume(), 1.0 / p0 - inv_p);
    for (int j = 0; j < f.m(); ++j) v *= std::pow(lp_power(f[j], P[static_cast<std::size_t>(j)], q), 1.0 / P[static_cast<std::size_t>(j)]);
    best = std::max(best, v);
  }
  return best;
}

inline double mu_of(const AtomicMeasure& mu, const DyadicCube& q) {
  double s = 0.0;
  for (const auto& a : mu.atoms())
    if (q.contains(mu.point(a))) s += a.mass;
  return s;
}

inline double growth(const AtomicMeasure& mu, double beta, const LevelWindow& w) {
  double best = 0.0;
  for (const auto& q : all_cubes(w)) best = std::max(best, mu_of(mu, q) / std::pow(q.side(), beta));
  return best;
}

inline double radon(const GridFunction& g, const AtomicMeasure& mu, double q, double q0, const LevelWindow& w) {
  double best = 0.0;
  for (const auto& Q : all_cubes(w)) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) {
      const auto x = mu.point(a);
      if (Q.contains(x)) s += a.mass * std::pow(std::abs(g.value_at(x)), q);
    }
    best = std::max(best, std::pow(Q.volume(), 1.0 / q0 - 1.0 / q) * std::pow(s, 1.0 / q));
  }
  return best;
}

/// Chain oracle at one point: every level from k_lo to K evaluated by cell
/// scans, then the sub-cell levels K+1..K+depth where cubes inside one cell
/// carry the cell value. Maximal takes the max, integral the sum.
inline double chain_value(const VectorFunction& f, double alpha, std::span<const double> x, bool maximal,
                          int k_lo, int depth = 400) {
  const int mn = f.m() * f.dim();
  const int K = f.finest_level();
  double acc = 0.0;
  for (int k = k_lo; k <= K + depth; ++k) {
    double t = 1.0;
    if (k <= K) {
      const auto q = cube_containing(x, k);
      t = std::exp2(k * (mn - alpha));
      for (int j = 0; j < f.m(); ++j) t *= std::abs(integral(f[j], q));
    } else {
      t = std::exp2(-k * alpha);
      for (int j = 0; j < f.m(); ++j) t *= std::abs(f[j].value_at(x));
    }
    acc = maximal ? std::max(acc, t) : acc + t;
  }
  return acc;
}

/// Owning copy, so a temporary field can be iterated.
inline std::vector<double> values(const OperatorField& g) { return {g.values().begin(), g.values().end()}; }

inline double rel(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace oracle
