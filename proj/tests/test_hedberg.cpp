#include <gtest/gtest.h>

#include <cmath>

#include "morrey/generators.hpp"
#include "morrey/hedberg.hpp"
#include "oracles.hpp"

using namespace morrey;

namespace {

bool names(const ExponentCheck& c, const std::string& hypothesis) {
  for (const auto& v : c.violations)
    if (v.hypothesis == hypothesis) return true;
  return false;
}

LevelWindow window_of(const VectorFunction& f, int coarse = 2) {
  return LevelWindow::make(f.root().level - coarse, f.finest_level(), f.root());
}

const VectorFunction kOne{GridFunction::constant(unit_cube(1), 5, 1.0)};

}  // namespace

TEST(Exponents, SubstitutionFlagsTheOrderingOfPAndP0) {
  // p = 1.5 exceeds p0 = 1.2 here; the formulas still evaluate.
  const auto c = exponents(1, 2, {3.0, 3.0}, 1.2, 0.75, 0.5, Regime::integral_via_maximal);
  EXPECT_DOUBLE_EQ(c.set.p, 1.5);
  EXPECT_NEAR(c.set.theta, 4.0, 1e-12);
  EXPECT_NEAR(c.set.q, 6.0, 1e-12);
  EXPECT_NEAR(c.set.q0, 4.8, 1e-12);
  EXPECT_FALSE(c.valid());
  ASSERT_EQ(c.violations.size(), 1u);
  EXPECT_EQ(c.violations[0].hypothesis, "p <= p0");
}

TEST(Exponents, ValidTupleSatisfiesDerivedRelations) {
  const auto c = exponents(1, 1, {1.2}, 1.2, 0.75, 0.5, Regime::integral_via_maximal);
  ASSERT_TRUE(c.valid());
  EXPECT_NEAR(c.set.theta, 4.0, 1e-12);
  EXPECT_GE(c.set.theta, 1.0);
  EXPECT_LE(c.set.q, c.set.q0);
  EXPECT_NEAR(c.set.q / c.set.p, c.set.theta, 1e-14);
  EXPECT_NEAR(c.set.q0 / c.set.p0, c.set.theta, 1e-14);
}

TEST(Exponents, EqualOrdersDegenerate) {
  const auto ok = exponents(1, 2, {1.5, 1.5}, 1.6, 0.5, 0.5, Regime::integral_via_integral);
  ASSERT_TRUE(ok.valid());
  EXPECT_EQ(ok.set.theta, 1.0);
  EXPECT_EQ(ok.set.q, ok.set.p);
  EXPECT_EQ(ok.set.q0, ok.set.p0);
  const auto bad = exponents(1, 1, {1.5}, 1.6, 0.5, 0.5, Regime::integral_via_maximal);
  EXPECT_TRUE(names(bad, "beta < alpha"));
}

TEST(Exponents, BoundaryP0EqualsNOverAlpha) {
  const auto c = exponents(1, 1, {1.5}, 2.0, 0.5, 0.25, Regime::integral_via_maximal);
  EXPECT_TRUE(names(c, "p0 < n/alpha"));
}

TEST(Exponents, RegimeSpecificHypotheses) {
  EXPECT_TRUE(names(exponents(1, 1, {1.5}, 1.5, 0.5, 0.2, Regime::integral_via_integral), "0 < p <= 1"));
  EXPECT_TRUE(names(exponents(1, 1, {1.5}, 1.5, 0.5, 0.2, Regime::integral_trace), "0 < p <= 1"));
  EXPECT_TRUE(exponents(1, 1, {1.5}, 1.5, 0.5, 0.2, Regime::maximal_trace).valid());
  EXPECT_TRUE(names(exponents(1, 2, {1.5, 1.5}, 1.6, 0.5, 0.2, Regime::integral_via_maximal), "1 < p"));
  EXPECT_TRUE(names(exponents(1, 1, {1.0}, 1.5, 0.5, 0.2, Regime::maximal_trace), "p_j in (1, inf)"));
  EXPECT_TRUE(names(exponents(1, 1, {1.5}, 1.5, 0.0, 0.2, Regime::maximal_trace), "0 < alpha"));
  // the trace regimes ignore beta
  EXPECT_EQ(exponents(1, 1, {1.5}, 1.5, 0.5, 9.0, Regime::maximal_trace).set.beta, 0.5);
}

TEST(Exponents, EveryViolationReported) {
  const auto c = exponents(1, 2, {0.5, 3.0}, 0.5, 3.0, 4.0, Regime::integral_via_maximal);
  EXPECT_TRUE(names(c, "p_j in (1, inf)"));
  EXPECT_TRUE(names(c, "alpha < mn"));
  EXPECT_TRUE(names(c, "p0 < n/alpha"));
  EXPECT_TRUE(names(c, "beta < alpha"));
  EXPECT_THROW(require_exponents(1, 2, {0.5, 3.0}, 0.5, 3.0, 4.0, Regime::integral_via_maximal), InvalidExponent);
}

TEST(Exponents, RegimeNames) {
  for (auto r : {Regime::integral_via_maximal, Regime::integral_via_integral, Regime::maximal_trace,
                 Regime::integral_trace})
    EXPECT_EQ(parse_regime(regime_name(r)), r);
  EXPECT_THROW(parse_regime("thm3"), InvalidArgument);
}

TEST(HedbergOptimal, WorkedPoint) {
  const auto e = require_exponents(1, 1, {1.2}, 1.2, 0.75, 0.5, Regime::integral_via_maximal);
  const auto h = hedberg_optimal(16.0, e);
  EXPECT_LE(oracle::rel(h.t_star, std::pow(16.0, -3.0)), 1e-13);
  EXPECT_LE(oracle::rel(h.bound, 2.0), 1e-13);
  EXPECT_LE(oracle::rel(numeric_crossing(16.0, e), h.t_star), 1e-6);
  const double mn = numeric_minimum(16.0, e);
  EXPECT_GE(mn, h.bound * (1 - 1e-12));
  EXPECT_LE(mn, 2.0 * h.bound);
}

TEST(HedbergOptimal, FixedPointAndVanishing) {
  const auto e = require_exponents(1, 1, {1.2}, 1.2, 0.75, 0.5, Regime::integral_via_maximal);
  EXPECT_DOUBLE_EQ(hedberg_optimal(1.0, e).t_star, 1.0);
  EXPECT_DOUBLE_EQ(hedberg_optimal(1.0, e).bound, 1.0);
  EXPECT_EQ(hedberg_optimal(0.0, e).bound, 0.0);
  EXPECT_EQ(numeric_minimum(0.0, e), 0.0);
  EXPECT_THROW(hedberg_optimal(-1.0, e), InvalidArgument);
}

TEST(HedbergOptimal, MinimumMatchesGoldenSection) {
  // Independent golden-section search over log t.
  for (double M : {1e-3, 0.2, 7.0, 1e4}) {
    const auto e = require_exponents(2, 2, {2.5, 3.0}, 1.5, 1.0, 0.6, Regime::integral_via_maximal);
    auto f = [&](double s) { return std::exp((e.alpha - e.beta) * s) * M + std::exp((e.alpha - e.n / e.p0) * s); };
    double a = std::log(hedberg_optimal(M, e).t_star) - 30, b = a + 60;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int i = 0; i < 200; ++i) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      (f(c) < f(d) ? b : a) = f(c) < f(d) ? d : c;
    }
    EXPECT_LE(oracle::rel(numeric_minimum(M, e), f(0.5 * (a + b))), 1e-6);
  }
}

TEST(HedbergOptimal, RejectsNonCrossingBranches) {
  ExponentSet e;
  e.n = 1;
  e.alpha = 0.5;
  e.beta = 0.9;
  e.p0 = 1.2;
  EXPECT_THROW(hedberg_optimal(2.0, e), InvalidExponent);
}

TEST(Telescoping, RootSplitKeepsOnlyTheAncestorTailOutside) {
  const auto w = window_of(kOne, 3);
  const std::vector<double> x{0.3};
  const auto chain = integral_chain(kOne, 0.5, x, w);
  const auto s = telescoping_split(kOne, 0.5, unit_cube(1), x, w);
  double coarse = chain.ancestor_tail;
  for (int i = 0; i < 3; ++i) coarse += chain.level_terms[static_cast<std::size_t>(i)];
  EXPECT_EQ(s.outer, coarse);
  EXPECT_LE(oracle::rel(s.outer, 1.0 + std::sqrt(2.0)), 1e-13);
  EXPECT_LE(oracle::rel(s.inner + s.outer, 3.0 + 2.0 * std::sqrt(2.0)), 1e-13);
}

TEST(Telescoping, PartsSumToTheIntegral) {
  Rng rng(3);
  const VectorFunction f{random_input(InputFamily::power_profile, unit_cube(2), 4, rng),
                         random_input(InputFamily::power_profile, unit_cube(2), 4, rng)};
  const auto w = window_of(f);
  const auto g = integral_dyadic(f, 1.4, w);
  for (std::size_t i = 0; i < g.cell_count(); i += 5) {
    const auto x = f[0].cell(i).center();
    for (int k = w.k_min; k <= w.k_max; ++k) {
      const auto s = telescoping_split(f, 1.4, cube_containing(x, k), x, w);
      EXPECT_LE(oracle::rel(s.inner + s.outer, g.value(i)), 1e-13);
    }
  }
  EXPECT_THROW(telescoping_split(f, 1.4, DyadicCube{1, IndexVec{1, 1}}, std::vector<double>{0.1, 0.1}, w),
               InvalidArgument);
}

TEST(HedbergRatio, IdentityRegimeIsOne) {
  Rng rng(4);
  const VectorFunction f{random_input(InputFamily::lognormal_cells, unit_cube(1), 5, rng),
                         random_input(InputFamily::lognormal_cells, unit_cube(1), 5, rng)};
  const auto e = require_exponents(1, 2, {1.5, 1.5}, 1.6, 0.5, 0.5, Regime::integral_via_integral);
  const auto r = hedberg_ratio(f, e, window_of(f));
  for (double v : r.ratio.values()) {
    if (v != 0.0) { EXPECT_NEAR(v, 1.0, 1e-14); }
  }
}

TEST(HedbergRatio, BoundedOnTheUnitInput) {
  const auto e = require_exponents(1, 1, {1.2}, 1.2, 0.5, 0.25, Regime::integral_via_maximal);
  const auto r = hedberg_ratio(kOne, e, window_of(kOne));
  EXPECT_TRUE(std::isfinite(r.sup));
  EXPECT_EQ(r.infinite_cells, 0u);
  EXPECT_GT(r.min, 0.0);
}

TEST(HedbergRatio, DilationInvariant) {
  Rng rng(5);
  const VectorFunction f{random_input(InputFamily::indicator_unions, unit_cube(2), 4, rng),
                         random_input(InputFamily::indicator_unions, unit_cube(2), 4, rng)};
  const auto w = window_of(f);
  const auto d = dilate(f, -1);
  const auto dw = LevelWindow::make(w.k_min - 1, w.k_max - 1, d.root());
  for (const auto& e : {require_exponents(2, 2, {3.0, 3.0}, 1.8, 0.8, 0.4, Regime::integral_via_maximal),
                        require_exponents(2, 2, {1.5, 1.5}, 1.8, 0.8, 0.4, Regime::integral_via_integral)}) {
    const auto a = hedberg_ratio(f, e, w);
    const auto b = hedberg_ratio(d, e, dw);
    for (std::size_t i = 0; i < a.ratio.cell_count(); ++i) EXPECT_LE(oracle::rel(a.ratio.value(i), b.ratio.value(i)), 1e-9);
  }
}

TEST(HedbergRatio, RegimeMismatchRejected) {
  const auto e = require_exponents(1, 1, {1.5}, 1.5, 0.5, 0.2, Regime::maximal_trace);
  EXPECT_THROW(hedberg_pointwise_bound(kOne, e, window_of(kOne)), InvalidArgument);
}

TEST(HedbergRatio, TelescopingConstantsFinite) {
  const auto e = require_exponents(1, 1, {1.2}, 1.2, 0.5, 0.25, Regime::integral_via_maximal);
  const auto h = hedberg_pointwise_bound(kOne, e, window_of(kOne));
  const auto c = telescoping_constants(h.normalized, e, window_of(kOne));
  EXPECT_TRUE(std::isfinite(c.inner));
  EXPECT_TRUE(std::isfinite(c.outer));
  EXPECT_GT(c.inner, 0.0);
}
