#pragma once

// JSON schemas for grid functions, measures, norm results and sparse certificates.
//
// Cubes serialize as tuples [n, level, m_1, ..., m_n].
//
// Grid function: {"n", "root"?, "K", "values" | "components" | "generator", "m"?}
//   generator kinds: constant {value}, indicator {cubes, value}, power {center, gamma},
//   random {family, seed}; "m" copies it into m components (random: seed + j).
// Measure: {"n", "K_mu", "atoms": [[x_1, ..., x_n, mass], ...]} or
//   {"n", "K_mu", "root"?, "generator": cell-lebesgue {} | hyperplane {axis, offset} |
//   random-atoms {count, seed}}.

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morrey/dyadic.hpp"
#include "morrey/error.hpp"
#include "morrey/generators.hpp"
#include "morrey/grid.hpp"
#include "morrey/hedberg.hpp"
#include "morrey/norms.hpp"
#include "morrey/operators.hpp"
#include "morrey/sparse.hpp"

namespace morrey {

using json = nlohmann::json;

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw Error(path + ": " + std::strerror(errno));
}

inline json read_json_file(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

inline json cube_json(const DyadicCube& q) {
  json t = json::array({q.dim(), q.level});
  for (auto m : q.index) t.push_back(m);
  return t;
}

inline DyadicCube cube_from_json(const json& t) {
  if (!t.is_array() || t.size() < 3) throw InvalidArgument("cube must be [n, level, m_1, ..., m_n]");
  const int n = t[0].get<int>();
  if (n < 1 || n > kMaxDim || static_cast<int>(t.size()) != n + 2)
    throw InvalidArgument("cube tuple length does not match its dimension");
  DyadicCube q{t[1].get<int>(), IndexVec(n)};
  for (int a = 0; a < n; ++a) q.index[a] = t[static_cast<std::size_t>(a) + 2].get<std::int64_t>();
  return q;
}

inline json norm_json(const NormResult& r) {
  json j{{"value", r.value}, {"witness_cube", cube_json(r.witness.base)}, {"cube_set_mode", to_string(r.mode)}};
  if (r.witness.shifted()) {
    json s = json::array();
    for (auto v : r.witness.shift) s.push_back(v);
    j["witness_shift"] = s;
  }
  return j;
}

inline json field_json(const OperatorField& g) {
  return json{{"n", g.dim()}, {"root", cube_json(g.root())}, {"K", g.finest_level()},
              {"values", std::vector<double>(g.values().begin(), g.values().end())}};
}

inline json function_json(const VectorFunction& f) {
  json comps = json::array();
  for (const auto& c : f.components()) comps.push_back(std::vector<double>(c.values().begin(), c.values().end()));
  return json{{"n", f.dim()}, {"root", cube_json(f.root())}, {"K", f.finest_level()}, {"components", comps}};
}

namespace detail {
template <class T>
T required(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw InvalidArgument(std::string(what) + " is missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string(what) + " field \"" + key + "\": " + e.what());
  }
}

inline DyadicCube root_from_json(const json& j, int n) {
  if (!j.contains("root")) return unit_cube(n);
  const auto r = cube_from_json(j.at("root"));
  if (r.dim() != n) throw InvalidArgument("root dimension differs from n");
  return r;
}

inline GridFunction generated_component(const json& g, const DyadicCube& root, int K, int j) {
  const auto kind = required<std::string>(g, "kind", "generator");
  if (kind == "constant") return GridFunction::constant(root, K, g.value("value", 1.0));
  if (kind == "indicator") {
    std::vector<DyadicCube> cubes;
    for (const auto& t : required<json>(g, "cubes", "indicator generator")) cubes.push_back(cube_from_json(t));
    return indicator(root, K, cubes, g.value("value", 1.0));
  }
  if (kind == "power")
    return power_profile(root, K, required<std::vector<double>>(g, "center", "power generator"),
                         required<double>(g, "gamma", "power generator"));
  if (kind == "random") {
    Rng rng(required<std::uint64_t>(g, "seed", "random generator") + static_cast<std::uint64_t>(j));
    return random_input(parse_input_family(required<std::string>(g, "family", "random generator")), root, K, rng);
  }
  throw InvalidArgument("unknown function generator '" + kind + "'");
}
}  // namespace detail

inline VectorFunction function_from_json(const json& j) {
  const int n = detail::required<int>(j, "n", "function");
  const int K = detail::required<int>(j, "K", "function");
  const DyadicCube root = detail::root_from_json(j, n);
  std::vector<GridFunction> comps;
  if (j.contains("values")) {
    comps.emplace_back(root, K, detail::required<std::vector<double>>(j, "values", "function"));
  } else if (j.contains("components")) {
    for (const auto& c : j.at("components")) comps.emplace_back(root, K, c.get<std::vector<double>>());
  } else if (j.contains("generator")) {
    const int m = j.value("m", 1);
    if (m < 1) throw InvalidArgument("function \"m\" must be >= 1");
    for (int c = 0; c < m; ++c) comps.push_back(detail::generated_component(j.at("generator"), root, K, c));
  } else {
    throw InvalidArgument("function needs \"values\", \"components\" or \"generator\"");
  }
  if (comps.empty()) throw InvalidArgument("function has no components");
  return VectorFunction(std::move(comps));
}

inline json measure_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) {
    json row = json::array();
    for (double x : mu.point(a)) row.push_back(x);
    row.push_back(a.mass);
    atoms.push_back(row);
  }
  return json{{"n", mu.dim()}, {"K_mu", mu.resolution()}, {"atoms", atoms}};
}

inline AtomicMeasure measure_from_json(const json& j) {
  const int n = detail::required<int>(j, "n", "measure");
  const int K = detail::required<int>(j, "K_mu", "measure");
  if (j.contains("atoms")) {
    std::vector<std::pair<std::vector<double>, double>> pts;
    for (const auto& row : j.at("atoms")) {
      auto v = row.get<std::vector<double>>();
      if (static_cast<int>(v.size()) != n + 1) throw InvalidArgument("measure atom must be [x_1, ..., x_n, mass]");
      const double mass = v.back();
      v.pop_back();
      pts.emplace_back(std::move(v), mass);
    }
    return AtomicMeasure::from_points(n, K, pts);
  }
  if (!j.contains("generator")) throw InvalidArgument("measure needs \"atoms\" or \"generator\"");
  const auto& g = j.at("generator");
  const DyadicCube root = detail::root_from_json(j, n);
  const auto kind = detail::required<std::string>(g, "kind", "generator");
  if (kind == "cell-lebesgue") return cell_lebesgue(root, K);
  if (kind == "hyperplane")
    return hyperplane(root, K, g.value("axis", n - 1), detail::required<std::int64_t>(g, "offset", "hyperplane generator"));
  if (kind == "random-atoms") {
    Rng rng(detail::required<std::uint64_t>(g, "seed", "random-atoms generator"));
    return random_atoms(root, K, rng, detail::required<int>(g, "count", "random-atoms generator"));
  }
  throw InvalidArgument("unknown measure generator '" + kind + "'");
}

inline json certificate_json(const SparseFamily& fam, const std::string& input_hash) {
  json cubes = json::array();
  for (const auto& s : fam.members) {
    json runs = json::array();
    for (auto [start, len] : s.owned.runs()) runs.push_back(json::array({start, len}));
    json stops = json::array();
    for (const auto& c : s.stopping) stops.push_back(cube_json(c));
    cubes.push_back(json{{"cube", cube_json(s.cube)}, {"stopping", stops}, {"E", runs}});
  }
  return json{{"root", cube_json(fam.root)}, {"K", fam.finest_level}, {"A", fam.threshold},
              {"eta", fam.eta},           {"input_hash", input_hash}, {"cubes", cubes}};
}

inline SparseFamily certificate_from_json(const json& j, std::string* input_hash = nullptr) {
  SparseFamily fam;
  fam.root = cube_from_json(detail::required<json>(j, "root", "certificate"));
  fam.finest_level = detail::required<int>(j, "K", "certificate");
  fam.threshold = detail::required<double>(j, "A", "certificate");
  fam.eta = detail::required<double>(j, "eta", "certificate");
  if (input_hash) *input_hash = j.value("input_hash", std::string{});
  const std::size_t cells = fam.lattice().cell_count();
  for (const auto& c : detail::required<json>(j, "cubes", "certificate")) {
    SparseMember s;
    s.cube = cube_from_json(detail::required<json>(c, "cube", "certificate cube"));
    for (const auto& t : c.value("stopping", json::array())) s.stopping.push_back(cube_from_json(t));
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (const auto& r : detail::required<json>(c, "E", "certificate cube"))
      runs.emplace_back(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
    s.owned = CellMask::from_runs(cells, runs);
    fam.members.push_back(std::move(s));
  }
  return fam;
}

inline json exponents_json(const ExponentCheck& c) {
  const auto& e = c.set;
  json v = json::array();
  for (const auto& x : c.violations) v.push_back(json{{"hypothesis", x.hypothesis}, {"detail", x.detail}});
  return json{{"regime", regime_name(e.regime)},
              {"n", e.n},
              {"m", e.m},
              {"P", e.exps},
              {"p", e.p},
              {"p0", e.p0},
              {"alpha", e.alpha},
              {"beta", e.beta},
              {"theta", e.theta},
              {"q", e.q},
              {"q0", e.q0},
              {"valid", c.valid()},
              {"violations", v}};
}

}  // namespace morrey
