#pragma once

// Named input families for grid functions and atomic measures.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"
#include "morrey/grid.hpp"

namespace morrey {

enum class InputFamily { indicator_unions, lognormal_cells, power_profile };
enum class MeasureFamily { cell_lebesgue, hyperplane, random_atoms };

inline std::string to_string(InputFamily f) {
  switch (f) {
    case InputFamily::indicator_unions: return "indicator-unions";
    case InputFamily::lognormal_cells: return "log-normal-cells";
    case InputFamily::power_profile: return "power-profile";
  }
  return "?";
}

inline std::string to_string(MeasureFamily f) {
  switch (f) {
    case MeasureFamily::cell_lebesgue: return "cell-lebesgue";
    case MeasureFamily::hyperplane: return "hyperplane";
    case MeasureFamily::random_atoms: return "random-atoms";
  }
  return "?";
}

inline InputFamily parse_input_family(const std::string& s) {
  for (auto f : {InputFamily::indicator_unions, InputFamily::lognormal_cells, InputFamily::power_profile})
    if (to_string(f) == s) return f;
  throw InvalidArgument("unknown input family '" + s + "'");
}

inline MeasureFamily parse_measure_family(const std::string& s) {
  for (auto f : {MeasureFamily::cell_lebesgue, MeasureFamily::hyperplane, MeasureFamily::random_atoms})
    if (to_string(f) == s) return f;
  throw InvalidArgument("unknown measure family '" + s + "'");
}

using Rng = std::mt19937_64;

/// `value` on the union of the given cubes, 0 elsewhere.
inline GridFunction indicator(const DyadicCube& root, int finest, const std::vector<DyadicCube>& cubes,
                              double value = 1.0) {
  return GridFunction::from_cells(root, finest, [&](const DyadicCube& c) {
    for (const auto& q : cubes)
      if (q.contains(c)) return value;
    return 0.0;
  });
}

/// |x - center|^{-gamma} sampled at cell centers (center should avoid cell centers).
inline GridFunction power_profile(const DyadicCube& root, int finest, const std::vector<double>& center, double gamma) {
  return GridFunction::from_cells(root, finest, [&](const DyadicCube& c) {
    const auto x = c.center();
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    return std::pow(r2, -0.5 * gamma);
  });
}

/// Independent exp(sigma Z) values on every cell.
inline GridFunction lognormal_cells(const DyadicCube& root, int finest, Rng& rng, double sigma = 1.0) {
  std::normal_distribution<double> z(0.0, sigma);
  return GridFunction::from_cells(root, finest, [&](const DyadicCube&) { return std::exp(z(rng)); });
}

/// A few random dyadic sub-cubes of the root, at most `depth` levels below it.
inline std::vector<DyadicCube> random_subcubes(const DyadicCube& root, int finest, Rng& rng, int count, int depth) {
  std::vector<DyadicCube> out;
  std::uniform_int_distribution<int> lvl(0, std::max(0, std::min(depth, finest - root.level)));
  for (int i = 0; i < count; ++i) {
    DyadicCube q = root;
    const int d = lvl(rng);
    for (int k = 0; k < d; ++k) q = child(q, std::uniform_int_distribution<unsigned>(0, (1u << root.dim()) - 1)(rng));
    out.push_back(q);
  }
  return out;
}

/// Strictly positive on a random union of sub-cubes, zero elsewhere.
inline GridFunction random_input(InputFamily family, const DyadicCube& root, int finest, Rng& rng) {
  const auto support = random_subcubes(root, finest, rng, 3, 1);
  const auto mask = indicator(root, finest, support, 1.0);
  GridFunction base;
  switch (family) {
    case InputFamily::indicator_unions: {
      std::uniform_real_distribution<double> h(0.5, 2.0);
      const auto extra = random_subcubes(root, finest, rng, 3, 3);
      const auto bump = indicator(root, finest, extra, h(rng));
      std::vector<double> v(mask.cell_count());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + bump.value(i);
      base = GridFunction(root, finest, std::move(v));
      break;
    }
    case InputFamily::lognormal_cells:
      base = lognormal_cells(root, finest, rng, 0.75);
      break;
    case InputFamily::power_profile: {
      std::uniform_real_distribution<double> g(0.1, 0.5);
      std::vector<double> c = root.center();
      // offset by a quarter cell so the singularity never sits on a sample point
      for (auto& x : c) x += 0.25 * std::ldexp(1.0, -finest);
      base = power_profile(root, finest, c, g(rng) * root.dim());
      break;
    }
  }
  std::vector<double> v(mask.cell_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask.value(i) * base.value(i);
  return GridFunction(root, finest, std::move(v));
}

/// Lebesgue measure discretised: one atom per level-`resolution` cell, mass = cell volume.
inline AtomicMeasure cell_lebesgue(const DyadicCube& root, int resolution) {
  std::vector<Atom> atoms;
  const double mass = std::ldexp(1.0, -resolution * root.dim());
  for_each_at_level(root, resolution, [&](const DyadicCube& c) { atoms.push_back(Atom{c.index, mass}); });
  return AtomicMeasure(root.dim(), resolution, std::move(atoms));
}

/// (n-1)-dimensional measure on the cell layer with index `offset` along `axis`:
/// one atom per cell of that layer, mass side^{n-1}.
inline AtomicMeasure hyperplane(const DyadicCube& root, int resolution, int axis, std::int64_t offset) {
  std::vector<Atom> atoms;
  const double mass = std::ldexp(1.0, -resolution * (root.dim() - 1));
  for_each_at_level(root, resolution, [&](const DyadicCube& c) {
    if (c.index[axis] == offset) atoms.push_back(Atom{c.index, mass});
  });
  if (atoms.empty()) throw InvalidArgument("hyperplane layer misses the root");
  return AtomicMeasure(root.dim(), resolution, std::move(atoms));
}

/// `count` atoms at uniformly chosen cells, log-normal masses scaled to total about |root|.
inline AtomicMeasure random_atoms(const DyadicCube& root, int resolution, Rng& rng, int count) {
  const std::int64_t side = std::int64_t{1} << (resolution - root.level);
  std::uniform_int_distribution<std::int64_t> pos(0, side - 1);
  std::normal_distribution<double> z(0.0, 0.5);
  std::vector<Atom> atoms;
  for (int i = 0; i < count; ++i) {
    IndexVec idx(root.dim());
    for (int a = 0; a < root.dim(); ++a) idx[a] = root.index[a] * side + pos(rng);
    atoms.push_back(Atom{idx, std::exp(z(rng)) * root.volume() / count});
  }
  return AtomicMeasure(root.dim(), resolution, std::move(atoms));
}

inline AtomicMeasure random_measure(MeasureFamily family, const DyadicCube& root, int resolution, Rng& rng) {
  switch (family) {
    case MeasureFamily::cell_lebesgue:
      return cell_lebesgue(root, resolution);
    case MeasureFamily::hyperplane: {
      const std::int64_t side = std::int64_t{1} << (resolution - root.level);
      std::uniform_int_distribution<std::int64_t> pos(0, side - 1);
      const int axis = root.dim() - 1;
      return hyperplane(root, resolution, axis, root.index[axis] * side + pos(rng));
    }
    case MeasureFamily::random_atoms: {
      const auto cells = std::int64_t{1} << (root.dim() * (resolution - root.level));
      return random_atoms(root, resolution, rng, static_cast<int>(std::max<std::int64_t>(1, cells / 4)));
    }
  }
  throw InvalidArgument("unknown measure family");
}

}  // namespace morrey
