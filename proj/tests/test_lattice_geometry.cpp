#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "simplexvar/errors.hpp"
#include "simplexvar/lattice_geometry.hpp"

using namespace simplexvar;

namespace {

SimplexConfig right_triangle(int n) {
  IntVec a(n, 0), b(n, 0);
  a[0] = 1;
  b[1] = 1;
  return SimplexConfig::from_vertices(n, {a, b});
}

}  // namespace

TEST(SimplexConfig, RejectsDegenerateVertices) {
  EXPECT_THROW(SimplexConfig::from_vertices(3, {{1, 2, 3}, {2, 4, 6}}), UsageError);
  EXPECT_THROW(SimplexConfig::from_vertices(3, {{0, 0, 0}}), UsageError);
  EXPECT_THROW(SimplexConfig::from_vertices(2, {{1, 0}, {0, 1}, {1, 1}}), UsageError);
  EXPECT_THROW(SimplexConfig::from_vertices(2, {{1, 0, 0}}), UsageError);
}

TEST(SimplexConfig, DistancesAndNorm) {
  const auto s = SimplexConfig::from_vertices(3, {{1, 1, 0}, {1, 0, 1}});
  EXPECT_EQ(s.dist_sq(0, 1), 2);
  EXPECT_EQ(s.dist_sq(0, 2), 2);
  EXPECT_EQ(s.dist_sq(1, 2), 2);
  EXPECT_EQ(s.norm_sq(), 4);
  EXPECT_EQ(s.dim(), 6);
  EXPECT_EQ(SimplexConfig::unit_edge(5).scaling_exponent(), 3);
  EXPECT_EQ(right_triangle(7).scaling_exponent(), 8);
  EXPECT_TRUE(SimplexConfig::unit_edge(5).in_counting_regime());
  EXPECT_FALSE(SimplexConfig::unit_edge(4).in_counting_regime());
}

TEST(CountRepresentations, SmallValues) {
  EXPECT_EQ(count_representations(5, 0), 1u);
  EXPECT_EQ(count_representations(5, 1), 10u);
  EXPECT_EQ(count_representations(1, 4), 2u);
  EXPECT_EQ(count_representations(1, 3), 0u);
  EXPECT_EQ(count_representations(2, 25), 12u);
  EXPECT_EQ(count_representations(3, 7), 0u);
}

TEST(CountRepresentations, JacobiFourSquares) {
  const auto table = representation_counts(4, 200);
  for (std::int64_t m = 0; m <= 200; ++m) {
    EXPECT_EQ(table[static_cast<std::size_t>(m)], oracle::jacobi_r4(m)) << "m=" << m;
  }
}

TEST(CountRepresentations, OverflowIsReported) {
  EXPECT_THROW(count_representations(64, 4000), CapacityError);
}

TEST(EnumerateSphere, MatchesBoxAndCounts) {
  for (int n = 1; n <= 5; ++n) {
    const auto box = oracle::box_spheres(n, 40);
    const auto counts = representation_counts(n, 40);
    for (std::int64_t m = 0; m <= 40; ++m) {
      const auto set = enumerate_sphere(n, m);
      ASSERT_EQ(oracle::rows_of(set), box[static_cast<std::size_t>(m)]) << "n=" << n << " m=" << m;
      EXPECT_EQ(set.count(), counts[static_cast<std::size_t>(m)]);
    }
  }
}

TEST(EnumerateSphere, SerialAndParallelIdentical) {
  const auto a = enumerate_sphere(5, 50, Exec::serial);
  const auto b = enumerate_sphere(5, 50, Exec::parallel);
  EXPECT_EQ(a.coords, b.coords);
}

TEST(EnumerateSimplex, Examples) {
  EXPECT_EQ(enumerate_simplex_copies(SimplexConfig::unit_edge(5), 1).count(), 10u);
  EXPECT_EQ(enumerate_simplex_copies(right_triangle(2), 1).count(), 8u);
  EXPECT_EQ(enumerate_simplex_copies(SimplexConfig::unit_edge(5), 4).count(), count_representations(5, 4));
  EXPECT_THROW(enumerate_simplex_copies(right_triangle(2), 0), UsageError);
}

TEST(EnumerateSimplex, EdgeEqualsSphere) {
  for (std::int64_t m = 1; m <= 30; ++m) {
    EXPECT_EQ(enumerate_simplex_copies(SimplexConfig::unit_edge(4), m).coords, enumerate_sphere(4, m).coords);
  }
}

TEST(EnumerateSimplex, PairOracleSmall) {
  const auto box = oracle::box_spheres(4, 40);
  const auto tri = right_triangle(4);
  const auto equi = SimplexConfig::from_vertices(4, {{1, 1, 0, 0}, {1, 0, 1, 0}});
  for (std::int64_t l2 = 1; l2 <= 20; ++l2) {
    EXPECT_EQ(oracle::rows_of(enumerate_simplex_copies(tri, l2)), oracle::pair_copies(box, tri, l2)) << l2;
    EXPECT_EQ(oracle::rows_of(enumerate_simplex_copies(equi, l2)), oracle::pair_copies(box, equi, l2)) << l2;
  }
}

TEST(EnumerateSimplex, ThreeVerticesVerify) {
  const auto s = SimplexConfig::from_vertices(4, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
  for (std::int64_t l2 = 1; l2 <= 9; ++l2) {
    const auto set = enumerate_simplex_copies(s, l2);
    for (std::size_t i = 0; i < set.count(); ++i) ASSERT_TRUE(verify_isometry(s, l2, set.point(i)));
    const auto ser = enumerate_simplex_copies(s, l2, Exec::serial);
    EXPECT_EQ(ser.coords, set.coords);
  }
  // lambda = 1: signed orthonormal triples of coordinate vectors.
  EXPECT_EQ(enumerate_simplex_copies(s, 1).count(), 8u * 6u * 4u);
}

TEST(EnumerateSimplex, ThreeVerticesMatchTripleScan) {
  const auto s = SimplexConfig::from_vertices(4, {{1, 0, 0, 0}, {1, 1, 0, 0}, {0, 1, 1, 0}});
  const auto box = oracle::box_spheres(4, 24);
  for (std::int64_t l2 = 1; l2 <= 8; ++l2) {
    std::vector<IntVec> want;
    for (const auto& a : box[static_cast<std::size_t>(l2 * s.dist_sq(0, 1))]) {
      for (const auto& b : box[static_cast<std::size_t>(l2 * s.dist_sq(0, 2))]) {
        if (oracle::dist_sq(a, b) != l2 * s.dist_sq(1, 2)) continue;
        for (const auto& c : box[static_cast<std::size_t>(l2 * s.dist_sq(0, 3))]) {
          if (oracle::dist_sq(a, c) != l2 * s.dist_sq(1, 3) || oracle::dist_sq(b, c) != l2 * s.dist_sq(2, 3)) continue;
          IntVec row = a;
          row.insert(row.end(), b.begin(), b.end());
          row.insert(row.end(), c.begin(), c.end());
          want.push_back(row);
        }
      }
    }
    EXPECT_EQ(oracle::rows_of(enumerate_simplex_copies(s, l2)), want) << l2;
  }
}

TEST(EnumerateSimplex, SymmetryClosure) {
  const auto s = right_triangle(3);
  const auto set = enumerate_simplex_copies(s, 5);
  const auto rows = oracle::rows_of(set);
  const std::set<IntVec> all(rows.begin(), rows.end());
  for (int flip = 0; flip < 8; ++flip) {
    for (const auto& r : rows) {
      IntVec t = r;
      for (int c = 0; c < 3; ++c) {
        if (flip >> c & 1) {
          t[c] = -t[c];
          t[3 + c] = -t[3 + c];
        }
      }
      ASSERT_TRUE(all.count(t));
    }
  }
  // Permuting coordinates simultaneously in both blocks also preserves every constraint.
  for (const auto& r : rows) {
    IntVec t = {r[1], r[2], r[0], r[4], r[5], r[3]};
    ASSERT_TRUE(all.count(t));
  }
}

TEST(VerifyIsometry, Examples) {
  const auto edge = SimplexConfig::unit_edge(5);
  const IntVec e2 = {0, 1, 0, 0, 0};
  const IntVec two_e1 = {2, 0, 0, 0, 0};
  EXPECT_TRUE(verify_isometry(edge, 1, e2));
  EXPECT_FALSE(verify_isometry(edge, 1, two_e1));
  const IntVec pair = {1, 0, 0, 1};
  EXPECT_TRUE(verify_isometry(right_triangle(2), 1, pair));
  const IntVec bad = {1, 0};
  EXPECT_THROW(verify_isometry(right_triangle(2), 1, bad), UsageError);
}

TEST(ScalingReport, Rows) {
  const std::vector<std::int64_t> lambdas = {1, 2};
  const auto rows = cardinality_scaling_report(SimplexConfig::unit_edge(5), lambdas);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].ratio, 10.0);
  EXPECT_EQ(rows[1].count, oracle::box_spheres(5, 4)[4].size());
  EXPECT_DOUBLE_EQ(rows[1].ratio, static_cast<double>(rows[1].count) / 8.0);
  EXPECT_FALSE(rows[0].regime_violated);
  const auto low = cardinality_scaling_report(SimplexConfig::unit_edge(4), lambdas);
  EXPECT_TRUE(low[0].regime_violated);
}

TEST(Isqrt, Exact) {
  for (std::int64_t v = 0; v < 10000; ++v) {
    const auto r = isqrt(v);
    ASSERT_LE(r * r, v);
    ASSERT_GT((r + 1) * (r + 1), v);
  }
  EXPECT_EQ(isqrt(std::int64_t{1} << 62), std::int64_t{1} << 31);
}
