#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "simplexvar/dyadic.hpp"
#include "simplexvar/errors.hpp"

using namespace simplexvar;

namespace {

DenseGrid gaussian(std::uint64_t seed, int period, int dim) {
  GeneratorSpec spec;
  spec.period = period;
  spec.dim = dim;
  return random_test_function(seed, spec);
}

}  // namespace

TEST(DyadicScheme, BaseFromSimplex) {
  EXPECT_EQ(DyadicScheme::for_simplex(SimplexConfig::unit_edge(5)).base, 2);
  // |s|^2 = 2: 2|s| = 2.83 -> 3.
  EXPECT_EQ(DyadicScheme::for_simplex(SimplexConfig::from_vertices(2, {{1, 1}})).base, 3);
  // |s|^2 = 4: 2|s| = 4 exactly.
  EXPECT_EQ(DyadicScheme::for_simplex(SimplexConfig::from_vertices(1, {{2}})).base, 4);
  EXPECT_THROW(DyadicScheme(1, 2), UsageError);
  EXPECT_EQ(DyadicScheme(2, 1).max_level, 40);
  EXPECT_EQ(DyadicScheme(2, 1).top_level(48), 4);
}

TEST(DyadicScheme, CubeIndexAndNesting) {
  const DyadicScheme s(2, 1);
  const std::int64_t zero[] = {0};
  EXPECT_EQ(s.cube_index(zero, 3), IntVec{0});
  const std::int64_t three[] = {3};
  EXPECT_EQ(s.cube_index(three, 1), IntVec{1});
  const std::int64_t neg[] = {-1};
  EXPECT_EQ(s.cube_index(neg, 2), IntVec{-1});
  const DyadicScheme t(3, 2);
  for (std::int64_t x = -30; x <= 30; ++x) {
    for (std::int64_t y = -30; y <= 30; ++y) {
      const std::int64_t p[] = {x, y};
      for (int l1 = 0; l1 <= 3; ++l1) {
        const auto c1 = t.cube_index(p, l1);
        for (int l2 = l1 + 1; l2 <= 4; ++l2) {
          // The coarse cube is determined by the fine cube alone.
          const auto from_fine = t.cube_index(IntVec{c1[0] * t.side(l1), c1[1] * t.side(l1)}, l2);
          ASSERT_EQ(t.cube_index(p, l2), from_fine);
        }
      }
    }
  }
  EXPECT_THROW(t.cube_index(zero, -1), UsageError);
}

TEST(ConditionalExpectation, Examples) {
  const DyadicScheme s(2, 1);
  DenseGrid delta(8, 1);
  delta[0] = 1.0;
  const auto e1 = conditional_expectation(delta, s, 1);
  EXPECT_EQ(e1[0], cplx(0.5));
  EXPECT_EQ(e1[1], cplx(0.5));
  for (std::size_t i = 2; i < 8; ++i) EXPECT_EQ(e1[i], cplx(0.0));
  const auto d1 = martingale_difference(delta, s, 1);
  EXPECT_EQ(d1[0], cplx(-0.5));
  EXPECT_EQ(d1[1], cplx(0.5));
  DenseGrid c(8, 2);
  for (auto& v : c.values()) v = 3.25;
  const DyadicScheme s2(2, 2);
  for (int l = 0; l <= 3; ++l) {
    const auto e = conditional_expectation(c, s2, l);
    for (const auto& v : e.values()) ASSERT_EQ(v, cplx(3.25));
  }
  const auto d2 = martingale_difference(c, s2, 2);
  for (const auto& v : d2.values()) ASSERT_EQ(v, cplx(0.0));
  EXPECT_THROW(conditional_expectation(DenseGrid(6, 1), s, 2), UsageError);
  EXPECT_THROW(martingale_difference(delta, s, 0), UsageError);
}

TEST(ConditionalExpectation, TowerExactAndContraction) {
  for (std::int64_t base : {2, 3}) {
    const int period = base == 2 ? 16 : 27;
    const DyadicScheme s(base, 3);
    const auto f = gaussian(static_cast<std::uint64_t>(base), period, 3);
    const int top = s.top_level(period);
    for (int a = 0; a <= top; ++a) {
      const auto ea = conditional_expectation(f, s, a);
      EXPECT_LE(lp_norm(ea, 2.0), lp_norm(f, 2.0) + 1e-12);
      EXPECT_LE(lp_norm(ea, INFINITY), lp_norm(f, INFINITY) + 1e-12);
      for (int b = 0; b <= top; ++b) {
        const auto eba = conditional_expectation(ea, s, b);
        const auto direct = conditional_expectation(f, s, std::max(a, b));
        for (std::size_t i = 0; i < f.size(); ++i) ASSERT_EQ(eba[i], direct[i]) << a << " " << b;
      }
    }
  }
}

TEST(ConditionalExpectation, MatchesCubeSumOracle) {
  const DyadicScheme s(2, 2);
  const auto f = gaussian(4, 8, 2);
  const auto e = conditional_expectation(f, s, 2);
  std::map<IntVec, cplx> sums;
  std::vector<std::int64_t> x(2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords_of(i, x);
    sums[s.cube_index(x, 2)] += f[i];
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords_of(i, x);
    ASSERT_NEAR(std::abs(e[i] - sums[s.cube_index(x, 2)] / 16.0), 0.0, 1e-14);
  }
}

TEST(MartingaleDifference, CubeSumsVanishAndOrthogonality) {
  const DyadicScheme s(2, 2);
  const auto f = gaussian(7, 16, 2);
  const int top = s.top_level(16);
  ASSERT_EQ(top, 4);
  std::vector<std::int64_t> x(2);
  DenseGrid sum = conditional_expectation(f, s, top);
  double energy = std::pow(lp_norm(sum, 2.0), 2);
  for (int m = 1; m <= top; ++m) {
    const auto d = martingale_difference(f, s, m);
    std::map<IntVec, cplx> cubes;
    for (std::size_t i = 0; i < d.size(); ++i) {
      d.coords_of(i, x);
      cubes[s.cube_index(x, m)] += d[i];
    }
    for (const auto& [t, v] : cubes) ASSERT_LT(std::abs(v), 1e-12);
    // Cubes grow with m, so sum_m D_m f = E_L f - f.
    for (std::size_t i = 0; i < f.size(); ++i) sum[i] -= d[i];
    energy += std::pow(lp_norm(d, 2.0), 2);
  }
  for (std::size_t i = 0; i < f.size(); ++i) ASSERT_NEAR(std::abs(sum[i] - f[i]), 0.0, 1e-12);
  const double total = std::pow(lp_norm(f, 2.0), 2);
  EXPECT_NEAR(energy, total, 1e-10 * total);
}

TEST(ConditionalExpectation, SparseMatchesDense) {
  const DyadicScheme s(2, 2);
  SparseFunction f(2);
  f.set({0, 0}, 1.0);
  f.set({5, 2}, -2.0);
  f.set({-3, 1}, 0.5);
  for (int l = 0; l <= 2; ++l) {
    const auto sparse = conditional_expectation(f, s, l);
    const auto dense = conditional_expectation(to_dense(f, 16), s, l);
    const auto back = to_dense(sparse, 16);
    for (std::size_t i = 0; i < dense.size(); ++i) ASSERT_NEAR(std::abs(back[i] - dense[i]), 0.0, 1e-15);
  }
  // Supported on the full cubes meeting supp f: three disjoint level-2 cubes of 16 points.
  EXPECT_EQ(conditional_expectation(f, s, 2).support_size(), 48u);
  const auto d = martingale_difference(f, s, 1);
  const auto dd = martingale_difference(to_dense(f, 16), s, 1);
  const auto back = to_dense(d, 16);
  for (std::size_t i = 0; i < dd.size(); ++i) ASSERT_NEAR(std::abs(back[i] - dd[i]), 0.0, 1e-15);
}

TEST(MartingaleJumps, ConstantLargeLamAndOracle) {
  const DyadicScheme s(2, 2);
  DenseGrid c(8, 2);
  for (auto& v : c.values()) v = 1.0;
  const std::vector<int> levels = {0, 1, 2, 3};
  EXPECT_EQ(lp_norm(martingale_jump_field(c, s, levels, 0.01).counts, INFINITY), 0.0);
  const auto f = gaussian(3, 8, 2);
  const double big = 2.0 * lp_norm(f, INFINITY) + 1e-9;
  EXPECT_EQ(lp_norm(martingale_jump_field(f, s, levels, big).counts, INFINITY), 0.0);
  const auto jf = martingale_jump_field(f, s, levels, 0.3);
  std::vector<DenseGrid> fam;
  for (int l : levels) fam.push_back(conditional_expectation(f, s, l));
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::vector<double> seq;
    for (const auto& g : fam) seq.push_back(g[i].real());
    ASSERT_EQ(static_cast<std::size_t>(jf.counts[i].real()), oracle::jumps(seq, 0.3));
  }
  const std::vector<int> bad = {1, 1};
  EXPECT_THROW(martingale_jump_field(f, s, bad, 0.3), UsageError);
}

TEST(ConditionalExpectation, SerialParallelIdentical) {
  const DyadicScheme s(2, 4);
  const auto f = gaussian(11, 16, 4);
  const auto a = conditional_expectation(f, s, 3, Exec::serial);
  const auto b = conditional_expectation(f, s, 3, Exec::parallel);
  for (std::size_t i = 0; i < f.size(); ++i) ASSERT_EQ(a[i], b[i]);
}
