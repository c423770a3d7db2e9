#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "morrey/generators.hpp"
#include "morrey/operators.hpp"
#include "oracles.hpp"

using namespace morrey;

namespace {

const double kSqrt2 = std::sqrt(2.0);

LevelWindow window_of(const VectorFunction& f, int coarse = 2) {
  return LevelWindow::make(f.root().level - coarse, f.finest_level(), f.root());
}

VectorFunction ones(int m, int K) {
  std::vector<GridFunction> c(static_cast<std::size_t>(m), GridFunction::constant(unit_cube(1), K, 1.0));
  return VectorFunction(c);
}

VectorFunction random_vector(std::uint64_t seed, int n, int m, int K) {
  Rng rng(seed);
  std::vector<GridFunction> c;
  for (int j = 0; j < m; ++j) c.push_back(random_input(InputFamily::lognormal_cells, unit_cube(n), K, rng));
  return VectorFunction(c);
}

// Oracle levels far enough out that both truncated tails are below 2^-60.
int oracle_k_lo(const VectorFunction& f, double alpha) {
  return f.root().level - static_cast<int>(std::ceil(60.0 / (f.m() * f.dim() - alpha)));
}
int oracle_depth(double alpha) { return static_cast<int>(std::ceil(60.0 / alpha)); }

}  // namespace

TEST(IntegralDyadic, GeometricSeriesOneSlot) {
  for (int K : {0, 3, 6}) {
    const auto g = integral_dyadic(ones(1, K), 0.5, window_of(ones(1, K)));
    for (double v : g.values()) EXPECT_NEAR(v, 3.0 + 2.0 * kSqrt2, 1e-12);
  }
}

TEST(IntegralDyadic, GeometricSeriesTwoSlots) {
  const auto f = ones(2, 5);
  for (double v : oracle::values(integral_dyadic(f, 1.0, window_of(f)))) EXPECT_NEAR(v, 3.0, 1e-12);
}

TEST(IntegralDyadic, ValueDoesNotDependOnTheWindow) {
  const auto f = random_vector(3, 1, 2, 5);
  const auto a = integral_dyadic(f, 0.7, window_of(f, 1));
  const auto b = integral_dyadic(f, 0.7, window_of(f, 9));
  for (std::size_t i = 0; i < a.cell_count(); ++i) EXPECT_NEAR(a.value(i), b.value(i), 1e-13 * a.value(i));
}

TEST(IntegralDyadic, MatchesChainOracle) {
  for (auto [n, m, K] : {std::tuple{1, 1, 5}, {1, 2, 4}, {2, 1, 3}, {2, 2, 2}}) {
    const auto f = random_vector(10 + n * 7 + m, n, m, K);
    for (double alpha : {0.3, 0.5 * m * n, m * n - 0.4}) {
      const auto g = integral_dyadic(f, alpha, window_of(f));
      for (std::size_t i = 0; i < g.cell_count(); ++i) {
        const auto x = f[0].cell(i).center();
        const double want = oracle::chain_value(f, alpha, x, false, oracle_k_lo(f, alpha), oracle_depth(alpha));
        EXPECT_LE(oracle::rel(g.value(i), want), 1e-12) << "n=" << n << " m=" << m << " alpha=" << alpha;
      }
    }
  }
}

TEST(MaximalDyadic, ConstantExamples) {
  for (double v : oracle::values(maximal_dyadic(ones(1, 4), 0.5, window_of(ones(1, 4))))) EXPECT_EQ(v, 1.0);
  for (double v : oracle::values(maximal_dyadic(ones(2, 4), 1.0, window_of(ones(2, 4))))) EXPECT_EQ(v, 1.0);
  for (double v : oracle::values(maximal_dyadic(ones(1, 4), 0.0, window_of(ones(1, 4))))) EXPECT_EQ(v, 1.0);
}

TEST(MaximalDyadic, MatchesChainOracle) {
  for (auto [n, m, K] : {std::tuple{1, 1, 5}, {1, 3, 3}, {2, 2, 3}}) {
    const auto f = random_vector(40 + n + m, n, m, K);
    for (double alpha : {0.0, 0.25 * m * n, m * n - 0.1}) {
      const auto g = maximal_dyadic(f, alpha, window_of(f, 1));
      for (std::size_t i = 0; i < g.cell_count(); ++i) {
        const auto x = f[0].cell(i).center();
        EXPECT_LE(oracle::rel(g.value(i), oracle::chain_value(f, alpha, x, true, -12, 0)), 1e-12);
      }
    }
  }
}

TEST(MaximalDyadic, WindowedSupIsExact) {
  const auto f = random_vector(5, 2, 2, 3);
  const auto a = maximal_dyadic(f, 1.5, window_of(f, 1));
  for (int coarse : {2, 5, 12}) {
    const auto b = maximal_dyadic(f, 1.5, window_of(f, coarse));
    for (std::size_t i = 0; i < a.cell_count(); ++i) EXPECT_EQ(a.value(i), b.value(i));
  }
}

TEST(MaximalDyadic, DominatedByIntegral) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const int n = 1 + static_cast<int>(s % 2), m = 1 + static_cast<int>(s % 3);
    const auto f = random_vector(100 + s, n, m, n == 1 ? 5 : 3);
    const double alpha = 0.2 + 0.6 * (m * n - 0.2) * static_cast<double>(s) / 10.0;
    const auto w = window_of(f);
    const auto mx = maximal_dyadic(f, alpha, w);
    const auto in = integral_dyadic(f, alpha, w);
    for (std::size_t i = 0; i < mx.cell_count(); ++i)
      EXPECT_LE(mx.value(i), std::nextafter(in.value(i), HUGE_VAL));
  }
}

TEST(HLMaximal, Examples) {
  const auto one = GridFunction::constant(unit_cube(1), 3, 1.0);
  const LevelWindow w = LevelWindow::make(-2, 3, unit_cube(1));
  for (double v : oracle::values(hl_maximal_dyadic(one, w))) EXPECT_EQ(v, 1.0);

  const auto half = GridFunction(unit_cube(1), 1, {1.0, 0.0});
  const auto g = hl_maximal_dyadic(half, LevelWindow::make(-2, 1, unit_cube(1)));
  EXPECT_EQ(g.value(0), 1.0);
  EXPECT_EQ(g.value(1), 0.5);
}

TEST(HLMaximal, DominatesModulus) {
  Rng rng(8);
  std::normal_distribution<double> z;
  const auto f = GridFunction::from_cells(unit_cube(2), 4, [&](const DyadicCube&) { return z(rng); });
  const auto g = hl_maximal_dyadic(f, LevelWindow::make(-1, 4, unit_cube(2)));
  for (std::size_t i = 0; i < f.cell_count(); ++i) EXPECT_GE(g.value(i), std::abs(f.value(i)));
}

TEST(IntegralDyadic, MultilinearAndHomogeneous) {
  const auto f = random_vector(21, 1, 3, 4);
  const auto w = window_of(f);
  const auto base = integral_dyadic(f, 1.1, w);
  const auto one_slot = integral_dyadic(VectorFunction({scaled(f[0], 2.5), f[1], f[2]}), 1.1, w);
  const auto all = integral_dyadic(VectorFunction({scaled(f[0], 2.0), scaled(f[1], 2.0), scaled(f[2], 2.0)}), 1.1, w);
  for (std::size_t i = 0; i < base.cell_count(); ++i) {
    EXPECT_LE(oracle::rel(one_slot.value(i), 2.5 * base.value(i)), 1e-12);
    EXPECT_LE(oracle::rel(all.value(i), 8.0 * base.value(i)), 1e-12);
  }
}

TEST(Operators, DilationCovariance) {
  for (auto [n, m] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}}) {
    const auto f = random_vector(60 + n * m, n, m, n == 1 ? 5 : 3);
    const auto d = dilate(f, -1);
    const double alpha = 0.45 * m * n;
    const auto w = window_of(f);
    const auto dw = LevelWindow::make(w.k_min - 1, w.k_max - 1, d.root());
    const auto in = integral_dyadic(f, alpha, w), din = integral_dyadic(d, alpha, dw);
    const auto mx = maximal_dyadic(f, alpha, w), dmx = maximal_dyadic(d, alpha, dw);
    for (std::size_t i = 0; i < in.cell_count(); ++i) {
      auto x = f[0].cell(i).center();
      for (auto& c : x) c *= 2.0;
      EXPECT_LE(oracle::rel(din.value_at(x), std::exp2(alpha) * in.value(i)), 1e-12);
      EXPECT_LE(oracle::rel(dmx.value_at(x), std::exp2(alpha) * mx.value(i)), 1e-12);
    }
  }
}

TEST(Operators, ExponentDomains) {
  const auto f = ones(2, 3);
  const auto w = window_of(f);
  EXPECT_THROW(maximal_dyadic(f, -0.1, w), InvalidExponent);
  EXPECT_THROW(maximal_dyadic(f, 2.0, w), InvalidExponent);
  EXPECT_NO_THROW(maximal_dyadic(f, 0.0, w));
  EXPECT_THROW(integral_dyadic(f, 0.0, w), InvalidExponent);
  EXPECT_THROW(integral_dyadic(f, 2.0, w), InvalidExponent);
  const VectorFunction neg{GridFunction(unit_cube(1), 1, {1.0, -1.0})};
  EXPECT_THROW(integral_dyadic(neg, 0.5, window_of(neg)), InvalidArgument);
  EXPECT_THROW(integral_dyadic(f, 1.0, LevelWindow::make(-1, 2, unit_cube(1))), InvalidArgument);
}

TEST(IntegralChain, SumsToTheField) {
  const auto f = random_vector(77, 2, 2, 3);
  const auto w = window_of(f, 3);
  const auto g = integral_dyadic(f, 1.3, w);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const auto c = integral_chain(f, 1.3, f[0].cell(i).center(), w);
    double s = c.ancestor_tail + c.fine_tail;
    for (double t : c.level_terms) s += t;
    EXPECT_LE(oracle::rel(s, g.value(i)), 1e-13);
  }
}

TEST(IntegralContinuous, SingleCellFarAway) {
  const int K = 6;
  std::vector<double> v(std::size_t{1} << K, 0.0);
  v[3] = std::exp2(K);  // unit mass in cell 3
  const VectorFunction f{GridFunction(unit_cube(1), K, std::move(v))};
  const auto x = f[0].cell(60).center();
  const double y = f[0].cell(3).center()[0];
  const auto r = integral_continuous(f, 0.5, x);
  EXPECT_LE(oracle::rel(r.value, std::pow(std::abs(x[0] - y), -0.5)), 1e-12);
}

TEST(IntegralContinuous, Linear) {
  const auto f = random_vector(31, 1, 2, 5);
  const auto x = f[0].cell(7).center();
  const double a = integral_continuous(f, 0.8, x).value;
  const double b = integral_continuous(VectorFunction({scaled(f[0], 2.0), f[1]}), 0.8, x).value;
  EXPECT_LE(oracle::rel(b, 2.0 * a), 1e-13);
}

TEST(IntegralContinuous, ConvergesUnderRefinement) {
  double prev = 0.0, prev_gap = HUGE_VAL;
  for (int K = 6; K <= 11; ++K) {
    const VectorFunction f{GridFunction::constant(unit_cube(1), K, 1.0)};
    const double v = integral_continuous(f, 0.5, cube_containing(std::vector<double>{0.5}, K).center()).value;
    if (K > 6) {
      const double gap = std::abs(v / prev - 1.0);
      EXPECT_LT(gap, prev_gap);
      prev_gap = gap;
    }
    prev = v;
  }
  EXPECT_LT(prev_gap, 0.02);
}

TEST(IntegralContinuous, DiscretizationConstantStable) {
  std::vector<double> consts;
  for (int K : {8, 9, 10}) {
    const VectorFunction f{GridFunction::constant(unit_cube(1), K, 1.0)};
    const auto dyadic = integral_dyadic(f, 0.5, window_of(f));
    double c = 0.0;
    for (std::size_t i = 0; i < f[0].cell_count(); i += 7)
      c = std::max(c, integral_continuous(f, 0.5, f[0].cell(i).center()).value / dyadic.value(i));
    ASSERT_TRUE(std::isfinite(c));
    consts.push_back(c);
  }
  EXPECT_LE(std::abs(consts[1] / consts[0] - 1.0), 0.1);
  EXPECT_LE(std::abs(consts[2] / consts[1] - 1.0), 0.1);
}

TEST(IntegralContinuous, Guards) {
  const auto f = ones(2, 6);
  const auto x = f[0].cell(0).center();
  EXPECT_THROW(integral_continuous(f, 1.0, x, 1000.0), CostGuard);
  EXPECT_THROW(integral_continuous(f, 1.0, std::vector<double>{0.3}), InvalidArgument);
  EXPECT_THROW(integral_continuous(f, 2.0, x), InvalidExponent);
  EXPECT_THROW(integral_continuous(f, 1.0, std::vector<double>{1.5}), OutOfWindow);
}

TEST(DominationConstant, InfiniteWhereRhsVanishes) {
  const OperatorField a(GridFunction(unit_cube(1), 1, {1.0, 1.0}));
  const OperatorField b(GridFunction(unit_cube(1), 1, {2.0, 0.0}));
  EXPECT_TRUE(std::isinf(domination_constant(a, b)));
  EXPECT_EQ(domination_constant(b, OperatorField(GridFunction(unit_cube(1), 1, {1.0, 1.0}))), 2.0);
}
