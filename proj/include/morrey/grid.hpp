#pragma once

// Piecewise-constant functions on the finest cells of a root cube, and atomic
// measures sitting at cell centers. Every dyadic integral at or above the
// finest level is an exact finite sum.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"

namespace morrey {

class GridFunction {
 public:
  GridFunction() = default;

  /// `values` are indexed by the level-K cells of `root` in lexicographic order
  /// of their lattice index (last axis fastest).
  GridFunction(DyadicCube root, int finest_level, std::vector<double> values)
      : root_(root), finest_(finest_level), values_(std::move(values)) {
    if (finest_ < root_.level) throw InvalidArgument("finest level must not be coarser than the root");
    if (finest_ - root_.level > 30) throw InvalidArgument("too many refinement levels");
    if (values_.size() != expected_size()) throw InvalidArgument("value array length does not match 2^{n(K-level(root))}");
    for (double v : values_)
      if (!std::isfinite(v)) throw InvalidArgument("grid values must be finite");
  }

  static GridFunction constant(const DyadicCube& root, int finest_level, double value) {
    GridFunction g;
    g.root_ = root;
    g.finest_ = finest_level;
    return GridFunction(root, finest_level, std::vector<double>(g.expected_size(), value));
  }

  /// Samples fn(cell) on every finest cell.
  template <class Fn>
  static GridFunction from_cells(const DyadicCube& root, int finest_level, Fn&& fn) {
    std::vector<double> v;
    for_each_at_level(root, finest_level, [&](const DyadicCube& c) { v.push_back(fn(c)); });
    return GridFunction(root, finest_level, std::move(v));
  }

  const DyadicCube& root() const { return root_; }
  int finest_level() const { return finest_; }
  int dim() const { return root_.dim(); }
  std::span<const double> values() const { return values_; }
  std::size_t cell_count() const { return values_.size(); }
  std::int64_t cells_per_axis() const { return std::int64_t{1} << (finest_ - root_.level); }
  double cell_volume() const { return std::ldexp(1.0, -finest_ * dim()); }
  double cell_side() const { return std::ldexp(1.0, -finest_); }
  double value(std::size_t linear) const { return values_[linear]; }

  DyadicCube cell(std::size_t linear) const {
    const std::int64_t side = cells_per_axis();
    DyadicCube c{finest_, IndexVec(dim())};
    auto rest = static_cast<std::int64_t>(linear);
    for (int a = dim() - 1; a >= 0; --a) {
      c.index[a] = root_.index[a] * side + rest % side;
      rest /= side;
    }
    return c;
  }

  /// Linear position of a level-K cell inside the root.
  std::size_t linear_index(const DyadicCube& cell) const {
    const std::int64_t side = cells_per_axis();
    std::int64_t lin = 0;
    for (int a = 0; a < dim(); ++a) lin = lin * side + (cell.index[a] - root_.index[a] * side);
    return static_cast<std::size_t>(lin);
  }

  bool in_root(std::span<const double> x) const { return root_.contains(x); }

  /// Cell value at x; zero outside the root.
  double value_at(std::span<const double> x) const {
    if (!in_root(x)) return 0.0;
    return values_[linear_index(cube_containing(x, finest_))];
  }

  bool same_lattice(const GridFunction& o) const { return root_ == o.root_ && finest_ == o.finest_; }

 private:
  std::size_t expected_size() const {
    return std::size_t{1} << (static_cast<std::size_t>(dim()) * static_cast<std::size_t>(finest_ - root_.level));
  }

  DyadicCube root_{0, IndexVec(1)};
  int finest_ = 0;
  std::vector<double> values_{0.0};
};

/// f = (f_1, ..., f_m), all on one lattice.
class VectorFunction {
 public:
  VectorFunction() = default;
  explicit VectorFunction(std::vector<GridFunction> components) : components_(std::move(components)) {
    if (components_.empty()) throw InvalidArgument("vector function needs at least one component");
    for (const auto& c : components_)
      if (!c.same_lattice(components_.front())) throw InvalidArgument("components must share root and finest level");
  }
  VectorFunction(std::initializer_list<GridFunction> c) : VectorFunction(std::vector<GridFunction>(c)) {}

  int m() const { return static_cast<int>(components_.size()); }
  int dim() const { return components_.front().dim(); }
  const DyadicCube& root() const { return components_.front().root(); }
  int finest_level() const { return components_.front().finest_level(); }
  const GridFunction& operator[](int j) const { return components_[static_cast<std::size_t>(j)]; }
  const std::vector<GridFunction>& components() const { return components_; }

 private:
  std::vector<GridFunction> components_;
};

struct Atom {
  IndexVec cell;  // level-K_mu cell holding the atom at its center
  double mass = 0.0;
};

class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  AtomicMeasure(int dim, int resolution, std::vector<Atom> atoms)
      : dim_(dim), resolution_(resolution), atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
      if (a.cell.dim() != dim_) throw InvalidArgument("atom dimension mismatch");
      if (!(a.mass >= 0.0) || !std::isfinite(a.mass)) throw InvalidArgument("atom masses must be finite and nonnegative");
    }
  }

  /// Each point is snapped to the level-`resolution` cell containing it.
  static AtomicMeasure from_points(int dim, int resolution,
                                   const std::vector<std::pair<std::vector<double>, double>>& points) {
    std::vector<Atom> atoms;
    for (const auto& [x, mass] : points) {
      if (static_cast<int>(x.size()) != dim) throw InvalidArgument("atom point dimension mismatch");
      atoms.push_back(Atom{cube_containing(x, resolution).index, mass});
    }
    return AtomicMeasure(dim, resolution, std::move(atoms));
  }

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  std::span<const Atom> atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  DyadicCube cell(const Atom& a) const { return DyadicCube{resolution_, a.cell}; }
  std::vector<double> point(const Atom& a) const { return cell(a).center(); }

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass;
    return s;
  }

 private:
  int dim_ = 1;
  int resolution_ = 0;
  std::vector<Atom> atoms_;
};

/// ∫_Q f over a dyadic cube at or above the finest level (Q may strictly contain the root).
inline double integrate(const GridFunction& f, const DyadicCube& q) {
  if (q.dim() != f.dim()) throw InvalidArgument("cube dimension mismatch");
  if (q.level > f.finest_level()) throw SubResolution("integration cube is finer than the grid");
  double s = 0.0;
  if (q.level <= f.root().level) {
    if (!q.contains(f.root())) return 0.0;
    for (double v : f.values()) s += v;
  } else {
    if (!f.root().contains(q)) return 0.0;
    for_each_at_level(q, f.finest_level(), [&](const DyadicCube& c) { s += f.value(f.linear_index(c)); });
  }
  return s * f.cell_volume();
}

/// (1/|Q|) ∫_Q |f|
inline double average(const GridFunction& f, const DyadicCube& q) {
  if (q.level > f.finest_level()) throw SubResolution("averaging cube is finer than the grid");
  std::vector<double> a(f.values().begin(), f.values().end());
  for (double& v : a) v = std::fabs(v);
  return integrate(GridFunction(f.root(), f.finest_level(), std::move(a)), q) / q.volume();
}

inline double measure_of(const AtomicMeasure& mu, const DyadicCube& q) {
  if (q.dim() != mu.dim()) throw InvalidArgument("cube dimension mismatch");
  if (q.level > mu.resolution()) throw SubResolution("measure query below atom resolution");
  double s = 0.0;
  for (const auto& a : mu.atoms())
    if (q.contains(mu.cell(a))) s += a.mass;
  return s;
}

/// x ↦ f(2^j x). On the dyadic lattice this only relabels levels.
inline GridFunction dilate(const GridFunction& f, int j) {
  DyadicCube root = f.root();
  root.level += j;
  return GridFunction(root, f.finest_level() + j, std::vector<double>(f.values().begin(), f.values().end()));
}

inline VectorFunction dilate(const VectorFunction& f, int j) {
  std::vector<GridFunction> c;
  for (const auto& g : f.components()) c.push_back(dilate(g, j));
  return VectorFunction(std::move(c));
}

/// Masses kept, positions scaled by 2^{-j}.
inline AtomicMeasure dilate(const AtomicMeasure& mu, int j) {
  return AtomicMeasure(mu.dim(), mu.resolution() + j, std::vector<Atom>(mu.atoms().begin(), mu.atoms().end()));
}

inline GridFunction scaled(const GridFunction& f, double c) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= c;
  return GridFunction(f.root(), f.finest_level(), std::move(v));
}

inline GridFunction absolute(const GridFunction& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x = std::fabs(x);
  return GridFunction(f.root(), f.finest_level(), std::move(v));
}

inline bool is_nonnegative(const VectorFunction& f) {
  for (const auto& g : f.components())
    for (double v : g.values())
      if (v < 0.0) return false;
  return true;
}

/// Dense per-level sums of a transformed grid function over the cubes of the root.
/// Children are accumulated into their parent in lexicographic order.
class LevelSums {
 public:
  template <class Transform>
  LevelSums(const GridFunction& f, Transform&& t) : root_(f.root()), finest_(f.finest_level()) {
    const int n = f.dim();
    const int depth = finest_ - root_.level;
    levels_.resize(static_cast<std::size_t>(depth + 1));
    auto& fine = levels_.back();
    fine.resize(f.cell_count());
    for (std::size_t i = 0; i < fine.size(); ++i) fine[i] = t(f.value(i));
    for (int d = depth; d > 0; --d) {
      const auto& src = levels_[static_cast<std::size_t>(d)];
      auto& dst = levels_[static_cast<std::size_t>(d - 1)];
      const std::int64_t side = std::int64_t{1} << d;
      const std::int64_t half = side >> 1;
      dst.assign(src.size() >> n, 0.0);
      for (std::size_t lin = 0; lin < src.size(); ++lin) {
        auto rest = static_cast<std::int64_t>(lin);
        std::int64_t plin = 0, mult = 1;
        for (int a = n - 1; a >= 0; --a) {
          plin += ((rest % side) >> 1) * mult;
          rest /= side;
          mult *= half;
        }
        dst[static_cast<std::size_t>(plin)] += src[lin];
      }
    }
  }

  double total() const { return levels_.front().front(); }
  int finest_level() const { return finest_; }
  const DyadicCube& root() const { return root_; }

  /// Level-k sums for cubes inside the root, lexicographic order.
  std::span<const double> level(int k) const { return levels_[static_cast<std::size_t>(k - root_.level)]; }

  /// Sum over the cells of q; q may be any dyadic cube at or above the finest level.
  double sum(const DyadicCube& q) const {
    if (q.level > finest_) throw SubResolution("pyramid query below finest level");
    if (q.level <= root_.level) return q.contains(root_) ? total() : 0.0;
    const int d = q.level - root_.level;
    const std::int64_t side = std::int64_t{1} << d;
    std::int64_t lin = 0;
    for (int a = 0; a < q.dim(); ++a) {
      const std::int64_t r = q.index[a] - root_.index[a] * side;
      if (r < 0 || r >= side) return 0.0;
      lin = lin * side + r;
    }
    return levels_[static_cast<std::size_t>(d)][static_cast<std::size_t>(lin)];
  }

 private:
  DyadicCube root_;
  int finest_;
  std::vector<std::vector<double>> levels_;
};

/// Per-level sums of weights attached to cells of a fine level, for levels
/// [coarsest, finest]. Ordered maps give a deterministic summation order that
/// matches LevelSums.
class SparseLevelSums {
 public:
  SparseLevelSums(int finest, int coarsest, const std::vector<std::pair<IndexVec, double>>& entries)
      : finest_(finest), coarsest_(std::min(coarsest, finest)) {
    levels_.resize(static_cast<std::size_t>(finest_ - coarsest_ + 1));
    auto& fine = levels_.back();
    for (const auto& [idx, w] : entries) fine[idx] += w;
    for (int k = finest_; k > coarsest_; --k) {
      auto& dst = levels_[static_cast<std::size_t>(k - 1 - coarsest_)];
      for (const auto& [idx, w] : levels_[static_cast<std::size_t>(k - coarsest_)]) {
        IndexVec p = idx;
        for (int a = 0; a < p.dim(); ++a) p[a] >>= 1;
        dst[p] += w;
      }
    }
  }

  double sum(const DyadicCube& q) const {
    if (q.level > finest_) throw SubResolution("measure query below atom resolution");
    if (q.level < coarsest_) throw InvalidArgument("measure query above the summed window");
    const auto& lvl = levels_[static_cast<std::size_t>(q.level - coarsest_)];
    auto it = lvl.find(q.index);
    return it == lvl.end() ? 0.0 : it->second;
  }

 private:
  int finest_;
  int coarsest_;
  std::vector<std::map<IndexVec, double>> levels_;
};

}  // namespace morrey
