#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "simplexvar/errors.hpp"
#include "simplexvar/grid_functions.hpp"
#include "simplexvar/rng.hpp"

using namespace simplexvar;

namespace {

DenseGrid random_complex(std::uint64_t seed, int period, int dim) {
  PortableRng rng(seed);
  DenseGrid g(period, dim);
  for (auto& v : g.values()) v = cplx(rng.normal(), rng.normal());
  return g;
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Dft, DeltaAndConstant) {
  DenseGrid delta(8, 1);
  delta[0] = 1.0;
  for (const auto& c : dft_forward(delta).coefficients) EXPECT_NEAR(std::abs(c - cplx(1.0)), 0.0, 1e-14);
  DenseGrid ones(8, 1);
  for (auto& v : ones.values()) v = 1.0;
  const auto s = dft_forward(ones);
  EXPECT_NEAR(std::abs(s.coefficients[0] - cplx(8.0)), 0.0, 1e-13);
  for (std::size_t a = 1; a < 8; ++a) EXPECT_NEAR(std::abs(s.coefficients[a]), 0.0, 1e-13);
  Spectrum all{8, 1, std::vector<cplx>(8, 1.0)};
  const auto back = dft_inverse(all);
  EXPECT_NEAR(std::abs(back[0] - cplx(1.0)), 0.0, 1e-14);
  for (std::size_t x = 1; x < 8; ++x) EXPECT_NEAR(std::abs(back[x]), 0.0, 1e-14);
}

TEST(Dft, MatchesNaiveOracle2D) {
  const auto f = random_complex(7, 16, 2);
  const auto fast = dft_forward(f);
  const std::vector<cplx> values(f.values().begin(), f.values().end());
  const auto slow = oracle::naive_dft(values, 16, 2, false);
  EXPECT_LT(max_diff(fast.coefficients, slow), 1e-10);
  const auto naive = dft_forward(f, DftBackend::naive);
  EXPECT_LT(max_diff(naive.coefficients, slow), 1e-10);

  const auto spec = random_complex(8, 16, 2);
  Spectrum s{16, 2, std::vector<cplx>(spec.values().begin(), spec.values().end())};
  const auto inv = dft_inverse(s);
  const auto inv_slow = oracle::naive_dft(s.coefficients, 16, 2, true);
  EXPECT_LT(max_diff(inv.values(), inv_slow), 1e-10);
  EXPECT_LT(max_diff(dft_inverse(s, DftBackend::naive).values(), inv_slow), 1e-10);
}

TEST(Dft, RoundTripAndParseval) {
  for (int dim = 1; dim <= 3; ++dim) {
    const auto f = random_complex(11 + dim, 12, dim);
    const auto s = dft_forward(f);
    const auto back = dft_inverse(s);
    EXPECT_LT(max_diff(back.values(), f.values()), 1e-10);
    double spec = 0.0;
    for (const auto& c : s.coefficients) spec += std::norm(c);
    spec /= static_cast<double>(f.size());
    const double l2 = lp_norm(f, 2.0);
    EXPECT_NEAR(l2 * l2, spec, 1e-10 * spec);
  }
}

TEST(Convolve, DeltaAndIdentity) {
  SparseFunction w(2);
  w.set({1, 0}, 0.25);
  w.set({0, -1}, 0.75);
  DenseGrid delta(6, 2);
  delta[0] = 1.0;
  const auto r = convolve(delta, w);
  EXPECT_FALSE(r.wraparound);
  const IntVec p1 = {1, 0}, p2 = {0, -1};
  EXPECT_DOUBLE_EQ(r.values[r.values.index_of(p1)].real(), 0.25);
  EXPECT_DOUBLE_EQ(r.values[r.values.index_of(p2)].real(), 0.75);
  SparseFunction id(2);
  id.set({0, 0}, 1.0);
  const auto f = random_complex(3, 6, 2);
  EXPECT_EQ(max_diff(convolve(f, id).values.values(), f.values()), 0.0);
}

TEST(Convolve, DenseMatchesSparseAndShift) {
  PortableRng rng(5);
  SparseFunction f(2), w(2);
  for (int i = 0; i < 6; ++i) f.set({static_cast<std::int64_t>(rng.bits() % 4), static_cast<std::int64_t>(rng.bits() % 4)}, rng.normal());
  for (int i = 0; i < 5; ++i) w.set({static_cast<std::int64_t>(rng.bits() % 5) - 2, static_cast<std::int64_t>(rng.bits() % 5) - 2}, rng.normal());
  const int period = 16;
  const auto dense = convolve(to_dense(f, period), w);
  const auto exact = to_dense(convolve(f, w), period);
  EXPECT_LT(max_diff(dense.values.values(), exact.values()), 1e-10);

  const auto g = random_complex(9, 10, 2);
  const IntVec off = {3, -4};
  const auto a = convolve(shift(g, off), w).values;
  const auto b = shift(convolve(g, w).values, off);
  EXPECT_EQ(max_diff(a.values(), b.values()), 0.0);

  SparseFunction wide(1);
  wide.set({0}, 1.0);
  wide.set({9}, 1.0);
  EXPECT_TRUE(convolve(DenseGrid(8, 1), wide).wraparound);
}

TEST(Convolve, SerialParallelIdentical) {
  const auto f = random_complex(4, 12, 3);
  SparseFunction w(3);
  PortableRng rng(1);
  for (int i = 0; i < 20; ++i) {
    w.set({static_cast<std::int64_t>(rng.bits() % 7) - 3, static_cast<std::int64_t>(rng.bits() % 7) - 3,
           static_cast<std::int64_t>(rng.bits() % 7) - 3},
          cplx(rng.normal(), rng.normal()));
  }
  const auto a = convolve(f, w, Exec::serial).values;
  const auto b = convolve(f, w, Exec::parallel).values;
  EXPECT_EQ(max_diff(a.values(), b.values()), 0.0);
}

TEST(Norms, Examples) {
  DenseGrid delta(5, 2);
  delta[3] = 1.0;
  EXPECT_DOUBLE_EQ(lp_norm(delta, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(lp_norm(delta, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(lp_norm(delta, INFINITY), 1.0);
  DenseGrid ones(4, 1);
  for (auto& v : ones.values()) v = 1.0;
  EXPECT_DOUBLE_EQ(lp_norm(ones, 2.0), 2.0);
  SparseFunction s(1);
  s.set({100}, cplx(3.0, 4.0));
  EXPECT_DOUBLE_EQ(lp_norm(s, 2.0), 5.0);
  EXPECT_THROW(lp_norm(ones, 0.5), UsageError);
}

TEST(SparseFunction, NoZeroEntries) {
  SparseFunction s(1);
  s.set({1}, 2.0);
  s.add({1}, -2.0);
  EXPECT_EQ(s.support_size(), 0u);
  s.set({-3}, 1.0);
  s.set({4}, 1.0);
  EXPECT_EQ(s.diameter(), 7);
}

TEST(Generators, DeterministicAndDelta) {
  GeneratorSpec spec;
  spec.period = 8;
  spec.dim = 2;
  const auto a = random_test_function(42, spec);
  const auto b = random_test_function(42, spec);
  EXPECT_EQ(max_diff(a.values(), b.values()), 0.0);
  EXPECT_GT(max_diff(a.values(), random_test_function(43, spec).values()), 0.0);
  for (const auto& v : a.values()) EXPECT_EQ(v.imag(), 0.0);

  spec.kind = GeneratorSpec::Kind::delta;
  const auto d = random_test_function(1, spec);
  EXPECT_EQ(d[0], cplx(1.0));
  EXPECT_DOUBLE_EQ(lp_norm(d, 1.0), 1.0);

  spec.kind = GeneratorSpec::Kind::box_indicator;
  spec.box_side = 3;
  EXPECT_DOUBLE_EQ(lp_norm(random_test_function(1, spec), 1.0), 9.0);

  EXPECT_THROW(GeneratorSpec::parse_kind("uniform"), UsageError);
  EXPECT_EQ(GeneratorSpec::parse_kind("fourier-band"), GeneratorSpec::Kind::fourier_band);
}

TEST(Generators, FourierBandSupport) {
  GeneratorSpec spec;
  spec.kind = GeneratorSpec::Kind::fourier_band;
  spec.period = 8;
  spec.dim = 2;
  spec.band = {3, 17, 40};
  const auto f = random_test_function(9, spec);
  const auto s = dft_forward(f);
  for (std::size_t a = 0; a < s.coefficients.size(); ++a) {
    const bool in = a == 3 || a == 17 || a == 40;
    if (in) {
      EXPECT_GT(std::abs(s.coefficients[a]), 1e-6);
    } else {
      EXPECT_LT(std::abs(s.coefficients[a]), 1e-12);
    }
  }
}
