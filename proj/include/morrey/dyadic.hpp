#pragma once

// Dyadic cubes 2^{-k}(m + [0,1)^n), identified exactly by (level k, index m).

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "morrey/error.hpp"

namespace morrey {

inline constexpr int kMaxDim = 4;

/// Fixed-capacity integer vector; the lattice index of a cube.
class IndexVec {
 public:
  IndexVec() = default;
  explicit IndexVec(int dim, std::int64_t fill = 0) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim)
      throw InvalidArgument("dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
    std::fill_n(v_.begin(), dim, fill);
  }
  IndexVec(std::initializer_list<std::int64_t> values) : IndexVec(static_cast<int>(values.size())) {
    std::copy(values.begin(), values.end(), v_.begin());
  }

  int dim() const { return dim_; }
  std::int64_t& operator[](int axis) { return v_[axis]; }
  std::int64_t operator[](int axis) const { return v_[axis]; }
  const std::int64_t* begin() const { return v_.data(); }
  const std::int64_t* end() const { return v_.data() + dim_; }

  friend bool operator==(const IndexVec& a, const IndexVec& b) {
    return a.dim_ == b.dim_ && std::equal(a.begin(), a.end(), b.begin());
  }
  friend std::strong_ordering operator<=>(const IndexVec& a, const IndexVec& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  std::array<std::int64_t, kMaxDim> v_{};
  int dim_ = 0;
};

struct IndexVecHash {
  std::size_t operator()(const IndexVec& m) const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(m.dim());
    for (auto c : m) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct DyadicCube {
  int level = 0;
  IndexVec index;

  int dim() const { return index.dim(); }
  double side() const { return std::ldexp(1.0, -level); }
  double volume() const { return std::ldexp(1.0, -level * dim()); }
  double lower(int axis) const { return std::ldexp(static_cast<double>(index[axis]), -level); }
  double upper(int axis) const { return std::ldexp(static_cast<double>(index[axis] + 1), -level); }

  std::vector<double> center() const {
    std::vector<double> c(static_cast<std::size_t>(dim()));
    for (int a = 0; a < dim(); ++a)
      c[static_cast<std::size_t>(a)] = std::ldexp(2.0 * static_cast<double>(index[a]) + 1.0, -level - 1);
    return c;
  }

  /// Half-open membership [lower, upper) on every axis.
  bool contains(std::span<const double> x) const {
    for (int a = 0; a < dim(); ++a) {
      const double xi = x[static_cast<std::size_t>(a)];
      if (xi < lower(a) || !(xi < upper(a))) return false;
    }
    return true;
  }

  /// True when `other` is a (not necessarily strict) dyadic sub-cube of this one.
  bool contains(const DyadicCube& other) const;

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Larger cubes first, then lexicographic index. This is the witness tie-break order.
inline bool precedes(const DyadicCube& a, const DyadicCube& b) {
  if (a.level != b.level) return a.level < b.level;
  return a.index < b.index;
}

inline DyadicCube make_cube(int level, IndexVec index) { return DyadicCube{level, index}; }

/// [0,1)^n
inline DyadicCube unit_cube(int dim) { return DyadicCube{0, IndexVec(dim, 0)}; }

/// Child `j` of Q; bit (n-1-a) of j selects the upper half along axis a, so
/// j = 0..2^n-1 enumerates children in lexicographic order.
inline DyadicCube child(const DyadicCube& q, unsigned j) {
  DyadicCube c{q.level + 1, IndexVec(q.dim())};
  const int n = q.dim();
  for (int a = 0; a < n; ++a) c.index[a] = 2 * q.index[a] + static_cast<std::int64_t>((j >> (n - 1 - a)) & 1u);
  return c;
}

inline std::vector<DyadicCube> children(const DyadicCube& q) {
  const unsigned count = 1u << q.dim();
  std::vector<DyadicCube> out;
  out.reserve(count);
  for (unsigned j = 0; j < count; ++j) out.push_back(child(q, j));
  return out;
}

inline DyadicCube ancestor(const DyadicCube& q, int target_level) {
  if (target_level > q.level)
    throw InvalidAncestry("ancestor level " + std::to_string(target_level) + " is finer than cube level " +
                          std::to_string(q.level));
  const int shift = q.level - target_level;
  DyadicCube a{target_level, IndexVec(q.dim())};
  // Arithmetic right shift floors negative indices (well defined since C++20).
  for (int ax = 0; ax < q.dim(); ++ax) a.index[ax] = shift >= 63 ? (q.index[ax] < 0 ? -1 : 0) : q.index[ax] >> shift;
  return a;
}

inline DyadicCube parent(const DyadicCube& q) { return ancestor(q, q.level - 1); }

inline bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim() != dim() || other.level < level) return false;
  return ancestor(other, level).index == index;
}

/// Dyadic cubes are nested or disjoint.
inline bool intersects(const DyadicCube& a, const DyadicCube& b) { return a.contains(b) || b.contains(a); }

/// The level-k cube containing x (half-open convention).
inline DyadicCube cube_containing(std::span<const double> x, int level) {
  const int n = static_cast<int>(x.size());
  DyadicCube q{level, IndexVec(n)};
  for (int a = 0; a < n; ++a)
    q.index[a] = static_cast<std::int64_t>(std::floor(std::ldexp(x[static_cast<std::size_t>(a)], level)));
  return q;
}

/// Truncation of the dyadic family to levels [k_min, k_max] around a root cube.
struct LevelWindow {
  int k_min = 0;
  int k_max = 0;
  DyadicCube root;

  static LevelWindow make(int k_min, int k_max, const DyadicCube& root) {
    if (!(k_min <= root.level && root.level <= k_max))
      throw InvalidArgument("level window requires k_min <= level(root) <= k_max");
    return LevelWindow{k_min, k_max, root};
  }

  /// The coarsest cube of the window: the level-k_min ancestor of the root.
  DyadicCube top() const { return ancestor(root, k_min); }
};

/// One cube per level in [k_min, k_max], each containing x and each the parent of the next.
inline std::vector<DyadicCube> cubes_containing(std::span<const double> x, const LevelWindow& window) {
  if (static_cast<int>(x.size()) != window.root.dim()) throw InvalidArgument("point dimension mismatch");
  if (!window.top().contains(x)) throw OutOfWindow("point lies outside the coarsest cube of the window");
  std::vector<DyadicCube> chain;
  chain.reserve(static_cast<std::size_t>(window.k_max - window.k_min + 1));
  for (int k = window.k_min; k <= window.k_max; ++k) chain.push_back(cube_containing(x, k));
  return chain;
}

/// Calls fn(cube) for every level-`level` cube inside `region`, in lexicographic order.
template <class Fn>
void for_each_at_level(const DyadicCube& region, int level, Fn&& fn) {
  if (level < region.level) return;
  const int n = region.dim();
  const std::int64_t side = std::int64_t{1} << (level - region.level);
  IndexVec base(n);
  for (int a = 0; a < n; ++a) base[a] = region.index[a] * side;
  IndexVec offset(n, 0);
  DyadicCube q{level, base};
  while (true) {
    for (int a = 0; a < n; ++a) q.index[a] = base[a] + offset[a];
    fn(static_cast<const DyadicCube&>(q));
    int a = n - 1;
    while (a >= 0 && ++offset[a] == side) offset[a--] = 0;
    if (a < 0) break;
  }
}

/// All cubes R ⊆ region with level in the window, coarse levels first.
inline std::vector<DyadicCube> enumerate(const LevelWindow& window, const DyadicCube& region) {
  if (region.level > window.k_max) throw InvalidArgument("region lies below the finest window level");
  std::vector<DyadicCube> out;
  for (int k = std::max(window.k_min, region.level); k <= window.k_max; ++k)
    for_each_at_level(region, k, [&](const DyadicCube& q) { out.push_back(q); });
  return out;
}

inline std::string to_string(const DyadicCube& q) {
  std::string s = "(" + std::to_string(q.dim()) + ", " + std::to_string(q.level);
  for (auto c : q.index) s += ", " + std::to_string(c);
  return s + ")";
}

}  // namespace morrey
