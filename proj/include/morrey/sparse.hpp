#pragma once

// Stopping-time sparse families, sparsity certificates, and the two sparse
// bounds (one summing over the owned sets E(S), one over the whole cubes S).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"
#include "morrey/grid.hpp"
#include "morrey/operators.hpp"

namespace morrey {

/// Bitset over the finest cells of a root cube.
class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(std::size_t size) : words_((size + 63) / 64, 0), size_(size) {}

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool v = true) {
    if (v)
      words_[i / 64] |= std::uint64_t{1} << (i % 64);
    else
      words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool intersects(const CellMask& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  /// this ⊆ o
  bool subset_of(const CellMask& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  CellMask& operator|=(const CellMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  CellMask& operator-=(const CellMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  /// Maximal runs of set cells as (start, length), ascending.
  std::vector<std::pair<std::size_t, std::size_t>> runs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i < size_) {
      if (!test(i)) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < size_ && test(j)) ++j;
      out.emplace_back(i, j - i);
      i = j;
    }
    return out;
  }

  static CellMask from_runs(std::size_t size, const std::vector<std::pair<std::size_t, std::size_t>>& runs) {
    CellMask m(size);
    for (auto [start, len] : runs) {
      if (start + len > size) throw InvalidArgument("run-length mask exceeds lattice size");
      for (std::size_t i = start; i < start + len; ++i) m.set(i);
    }
    return m;
  }

  friend bool operator==(const CellMask&, const CellMask&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Finest cells of `lattice` lying in cube q (q inside the root, at or above the finest level).
inline CellMask cube_mask(const GridFunction& lattice, const DyadicCube& q) {
  CellMask m(lattice.cell_count());
  if (q.level <= lattice.root().level) {
    if (q.contains(lattice.root()))
      for (std::size_t i = 0; i < m.size(); ++i) m.set(i);
    return m;
  }
  if (!lattice.root().contains(q)) return m;
  for_each_at_level(q, lattice.finest_level(), [&](const DyadicCube& c) { m.set(lattice.linear_index(c)); });
  return m;
}

struct SparseMember {
  DyadicCube cube;
  std::vector<DyadicCube> stopping;  // stopping cubes directly below this one
  CellMask owned;                    // E(S)
};

struct SparseFamily {
  DyadicCube root;
  int finest_level = 0;
  double threshold = 0.0;  // A
  double eta = 1.0;        // realized min |E(S)|/|S|
  std::vector<SparseMember> members;

  int dim() const { return root.dim(); }
  GridFunction lattice() const { return GridFunction::constant(root, finest_level, 0.0); }
  double cell_volume() const { return std::ldexp(1.0, -finest_level * dim()); }

  double realized_eta() const {
    double eta_min = 1.0;
    const auto lat = lattice();
    for (const auto& s : members) {
      const double cells = static_cast<double>(cube_mask(lat, s.cube).count());
      eta_min = std::min(eta_min, static_cast<double>(s.owned.count()) / cells);
    }
    return eta_min;
  }
};

/// Default stopping threshold A = 2^{mn+1}.
inline double default_threshold(int m, int n) { return std::ldexp(1.0, m * n + 1); }

namespace detail {

struct AverageProduct {
  std::vector<LevelSums> sums;
  double cell_volume;

  explicit AverageProduct(const VectorFunction& f) : cell_volume(f[0].cell_volume()) {
    for (const auto& g : f.components()) sums.emplace_back(g, [](double v) { return std::fabs(v); });
  }
  double operator()(const DyadicCube& q) const {
    double p = 1.0;
    for (const auto& s : sums) p *= s.sum(q) * cell_volume / q.volume();
    return p;
  }
};

}  // namespace detail

/// Stopping-time family: below each S, stop at the maximal R ⊊ S with
/// prod_j avg_R|f_j| > A prod_j avg_S|f_j|; recurse down to the finest level.
inline SparseFamily build_sparse(const VectorFunction& f, double threshold, const LevelWindow& window) {
  detail::check_window(f, window);
  if (!(threshold > 1.0)) throw InvalidArgument("stopping threshold A must exceed 1");
  if (!is_nonnegative(f)) throw InvalidArgument("sparse construction requires nonnegative inputs");
  const detail::AverageProduct avg(f);
  const GridFunction lat = f[0];
  const int K = f.finest_level();

  SparseFamily fam;
  fam.root = f.root();
  fam.finest_level = K;
  fam.threshold = threshold;
  fam.members.push_back(SparseMember{f.root(), {}, {}});

  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const DyadicCube s = fam.members[i].cube;
    const double target = threshold * avg(s);
    std::vector<DyadicCube> stops;
    auto descend = [&](auto&& self, const DyadicCube& q) -> void {
      if (q.level >= K) return;
      for (const auto& r : children(q)) {
        if (avg(r) > target)
          stops.push_back(r);
        else
          self(self, r);
      }
    };
    descend(descend, s);
    CellMask owned = cube_mask(lat, s);
    for (const auto& r : stops) owned -= cube_mask(lat, r);
    fam.members[i].owned = std::move(owned);
    fam.members[i].stopping = stops;
    for (const auto& r : stops) fam.members.push_back(SparseMember{r, {}, {}});
  }
  fam.eta = fam.realized_eta();
  return fam;
}

struct SparseVerdict {
  bool certified = false;
  double realized_eta = 0.0;
  std::string failure;                                      // empty when certified
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // overlapping E sets
  std::optional<std::size_t> cube;                          // offending member
};

/// Checks E(S) ⊆ S, pairwise disjointness of the E sets, |E(S)| >= eta_req |S|,
/// and that the cubes are distinct and nested-or-disjoint.
inline SparseVerdict verify_sparse(const SparseFamily& fam, double eta_req) {
  SparseVerdict v;
  const auto lat = fam.lattice();
  CellMask seen(lat.cell_count());
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const auto& s = fam.members[i];
    if (s.cube.level > fam.finest_level || !fam.root.contains(s.cube)) {
      v.failure = "cube " + to_string(s.cube) + " is not a lattice cube of the root";
      v.cube = i;
      return v;
    }
    if (s.owned.size() != lat.cell_count()) {
      v.failure = "owned-set mask of " + to_string(s.cube) + " has the wrong size";
      v.cube = i;
      return v;
    }
    const CellMask full = cube_mask(lat, s.cube);
    if (!s.owned.subset_of(full)) {
      v.failure = "E(S) is not contained in S for " + to_string(s.cube);
      v.cube = i;
      return v;
    }
    if (static_cast<double>(s.owned.count()) < eta_req * static_cast<double>(full.count())) {
      v.failure = "|E(S)| < eta |S| for " + to_string(s.cube);
      v.cube = i;
      return v;
    }
    if (s.owned.intersects(seen)) {
      for (std::size_t j = 0; j < i; ++j)
        if (fam.members[j].owned.intersects(s.owned)) {
          v.pair = std::make_pair(j, i);
          break;
        }
      v.failure = "owned sets of " + to_string(fam.members[v.pair->first].cube) + " and " + to_string(s.cube) +
                  " overlap";
      return v;
    }
    seen |= s.owned;
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = fam.members[j].cube;
      if (o == s.cube) {
        v.failure = "cube " + to_string(o) + " appears twice";
        v.pair = std::make_pair(j, i);
        return v;
      }
    }
  }
  v.realized_eta = fam.realized_eta();
  v.certified = true;
  return v;
}

namespace detail {

template <bool OwnedOnly>
OperatorField sparse_bound(const SparseFamily& fam, const VectorFunction& f, double alpha) {
  if (f.root() != fam.root || f.finest_level() != fam.finest_level)
    throw InvalidArgument("input lattice differs from the sparse family lattice");
  if (!(alpha >= 0.0)) throw InvalidExponent("sparse bound requires alpha >= 0");
  if (const auto v = verify_sparse(fam, 0.0); !v.certified) throw InvalidArgument("invalid sparse family: " + v.failure);
  const AverageProduct avg(f);
  const GridFunction lat = fam.lattice();
  std::vector<double> out(lat.cell_count(), 0.0);
  for (const auto& s : fam.members) {
    const double term = std::pow(s.cube.side(), alpha) * avg(s.cube);
    const CellMask mask = OwnedOnly ? s.owned : cube_mask(lat, s.cube);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (mask.test(i)) out[i] += term;
  }
  return OperatorField(GridFunction(fam.root, fam.finest_level, std::move(out)));
}

}  // namespace detail

/// sum_S |S|^{alpha/n} prod_j avg_S|f_j| 1_{E(S)}
inline OperatorField sparse_maximal_bound(const SparseFamily& fam, const VectorFunction& f, double alpha) {
  return detail::sparse_bound<true>(fam, f, alpha);
}

/// sum_S |S|^{alpha/n} prod_j avg_S|f_j| 1_S
inline OperatorField sparse_integral_bound(const SparseFamily& fam, const VectorFunction& f, double alpha) {
  return detail::sparse_bound<false>(fam, f, alpha);
}

/// Members contained in q0.
inline SparseFamily restrict_to(const SparseFamily& fam, const DyadicCube& q0) {
  SparseFamily out = fam;
  out.members.clear();
  for (const auto& s : fam.members)
    if (q0.contains(s.cube)) out.members.push_back(s);
  return out;
}

/// Members strictly containing q0.
inline SparseFamily strictly_above(const SparseFamily& fam, const DyadicCube& q0) {
  SparseFamily out = fam;
  out.members.clear();
  for (const auto& s : fam.members)
    if (s.cube.contains(q0) && s.cube != q0) out.members.push_back(s);
  return out;
}

struct SubadditivityResult {
  bool holds = true;
  double worst_margin = std::numeric_limits<double>::infinity();  // min over cells of sum g^p - (sum g)^p
};

/// Cellwise (sum_i g_i)^p <= sum_i g_i^p for 0 < p <= 1.
inline SubadditivityResult subadditivity_check(const std::vector<OperatorField>& fields, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidExponent("subadditivity of t^p requires 0 < p <= 1");
  SubadditivityResult r;
  if (fields.empty()) return r;
  const std::size_t cells = fields.front().cell_count();
  for (const auto& g : fields)
    if (g.cell_count() != cells) throw InvalidArgument("fields must share a lattice");
  for (std::size_t i = 0; i < cells; ++i) {
    double sum = 0.0, sum_pow = 0.0;
    for (const auto& g : fields) {
      const double v = g.value(i);
      if (v < 0.0) throw InvalidArgument("subadditivity check needs nonnegative fields");
      sum += v;
      sum_pow += std::pow(v, p);
    }
    const double margin = sum_pow - std::pow(sum, p);
    r.worst_margin = std::min(r.worst_margin, margin);
    // one rounding unit on each side
    if (margin < -4.0 * std::numeric_limits<double>::epsilon() * sum_pow) r.holds = false;
  }
  return r;
}

}  // namespace morrey
