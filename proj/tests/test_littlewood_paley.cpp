#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "simplexvar/errors.hpp"
#include "simplexvar/littlewood_paley.hpp"
#include "simplexvar/rng.hpp"

using namespace simplexvar;

namespace {

// |s| = 2: the arcs stay apart for the (l, j) used below.
SimplexConfig wide(int n) {
  IntVec v(n, 0);
  v[0] = 2;
  return SimplexConfig::from_vertices(n, {v});
}

std::vector<double> freq(std::span<const std::int64_t> a, int period) {
  std::vector<double> xi;
  for (auto c : a) xi.push_back(static_cast<double>(c) / period);
  return xi;
}

// Iterates all a in {0..N-1}^dim.
template <class Fn>
void for_grid(int period, int dim, Fn&& fn) {
  std::vector<std::int64_t> a(dim, 0);
  while (true) {
    fn(std::span<const std::int64_t>(a));
    int i = dim - 1;
    while (i >= 0 && a[i] == period - 1) a[i--] = 0;
    if (i < 0) return;
    ++a[i];
  }
}

// Space-side psi(y) = 2 * int_0^1 psi_hat1(eta) cos(2 pi y eta) d eta, composite Simpson on [1/2, 1].
double psi_space(double y) {
  const double head = y == 0.0 ? 1.0 : std::sin(std::numbers::pi * y) / (std::numbers::pi * y);
  const int m = 4000;
  const double h = 0.5 / m;
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double eta = 0.5 + i * h;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * psi_hat1(eta) * std::cos(2.0 * std::numbers::pi * y * eta);
  }
  return head + 2.0 * acc * h / 3.0;
}

}  // namespace

TEST(Lcm, Values) {
  EXPECT_EQ(lcm_t(0), 1u);
  EXPECT_EQ(lcm_t(1), 2u);
  EXPECT_EQ(lcm_t(2), 12u);
  EXPECT_EQ(lcm_t(3), 840u);
  EXPECT_EQ(lcm_t(5), 144403552893600u);
  EXPECT_THROW(lcm_t(6), CapacityError);
}

TEST(Psi, Profile) {
  EXPECT_DOUBLE_EQ(transition_sigma(0.5), 0.5);
  EXPECT_EQ(transition_sigma(0.0), 0.0);
  EXPECT_EQ(transition_sigma(1.0), 1.0);
  EXPECT_DOUBLE_EQ(psi_hat1(0.75), 0.5);
  EXPECT_EQ(psi_hat1(0.5), 1.0);
  EXPECT_EQ(psi_hat1(-1.0), 0.0);
  const std::vector<double> zero = {0.0, 0.0, 0.0};
  EXPECT_EQ(psi_hat(zero), 1.0);
  const std::vector<double> out = {0.1, 1.2};
  EXPECT_EQ(psi_hat(out), 0.0);
  for (double t = 0.5; t < 1.0; t += 0.01) EXPECT_GE(psi_hat1(t), psi_hat1(t + 0.01));
  EXPECT_THROW(PsiSpec{2}(zero), UsageError);
}

TEST(MultiplierPsi, ZeroAndSupport) {
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_EQ(multiplier_psi(12, 13.0, zero), 1.0);
  // step * xi is 0.3 away from the integers and step / width = 0.25.
  const std::vector<double> off = {0.3 / 12.0};
  EXPECT_EQ(multiplier_psi(12, 48.0, off), 0.0);
  EXPECT_THROW(multiplier_psi_axis(0, 1.0, 0.0), UsageError);
}

TEST(MultiplierPsi, QuadratureOracle) {
  PortableRng rng(17);
  const struct {
    std::uint64_t step;
    double width;
  } cases[] = {{1, 4.0}, {2, 3.0}, {12, 16.0}};
  for (const auto& c : cases) {
    for (int t = 0; t < 6; ++t) {
      const double xi = rng.uniform();
      double direct = 0.0;
      const auto step = static_cast<double>(c.step);
      for (int m = -400; m <= 400; ++m) {
        const double x = step * m;
        direct += step / c.width * psi_space(x / c.width) * std::cos(2.0 * std::numbers::pi * x * xi);
      }
      EXPECT_NEAR(multiplier_psi_axis(c.step, c.width, xi), direct, 1e-6) << c.step << " " << c.width << " " << xi;
    }
  }
}

TEST(MultiplierPsi, PlateauAndSupportOnGrid) {
  for (int n : {1, 2}) {
    const auto s = wide(n);
    const int period = n == 1 ? 96 : 24;
    for (int j = 0; j <= 2; ++j) {
      for (int l = j + 1; l <= 6; ++l) {
        const auto spec = MultiplierSpec::make(s, l, j);
        const auto arcs = FrequencyArcs::make(s, l, j);
        for_grid(period, n, [&](std::span<const std::int64_t> a) {
          const auto xi = freq(a, period);
          const double v = multiplier_Psi(s, l, j, xi);
          if (!arcs.contains_grid(a, period)) ASSERT_EQ(v, 0.0);
          if (!spec.arcs_overlap() && arcs.contains_grid(a, period, 1)) ASSERT_EQ(v, 1.0);
          if (!spec.arcs_overlap()) ASSERT_LE(v, 1.0);
          // Up to two translates meet per axis once width > step.
          if (!spec.width_below_step()) ASSERT_LE(v, std::pow(2.0, n));
        });
      }
    }
  }
}

TEST(MultiplierPsi, DeltaVanishesOnInnerHalfArcs) {
  const auto s = wide(1);
  const int period = 96;
  for (int j = 0; j <= 1; ++j) {
    for (int l = j + 2; l <= 7; ++l) {
      if (MultiplierSpec::make(s, l, j).arcs_overlap() || MultiplierSpec::make(s, l, j + 1).arcs_overlap()) continue;
      const auto arcs = FrequencyArcs::make(s, l, j);
      for_grid(period, 1, [&](std::span<const std::int64_t> a) {
        const auto xi = freq(a, period);
        if (arcs.contains_grid(a, period, 1, -1)) ASSERT_EQ(multiplier_DeltaPsi(s, l, j, xi), 0.0);
        ASSERT_LE(std::abs(multiplier_DeltaPsi(s, l, j, xi)), 1.0);
      });
    }
  }
  const std::vector<double> zero = {0.0};
  EXPECT_EQ(multiplier_DeltaPsi(s, 5, 1, zero), 0.0);
  EXPECT_EQ(multiplier_scale_increment(s, 5, 1, zero), 0.0);
}

TEST(MultiplierPsi, CompositionMatches) {
  const auto s = wide(2);
  PortableRng rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> xi = {rng.uniform(), rng.uniform()};
    const auto m = MultiplierSpec::make(s, 5, 1);
    EXPECT_EQ(multiplier_Psi(s, 5, 1, xi), multiplier_psi(m.step, m.width, xi));
    EXPECT_EQ(multiplier_DeltaPsi(s, 5, 1, xi), multiplier_Psi(s, 5, 2, xi) - multiplier_Psi(s, 5, 1, xi));
  }
}

TEST(Arcs, Membership) {
  const auto s = wide(2);
  const auto arcs = FrequencyArcs::make(s, 5, 2);
  const std::vector<double> lattice = {5.0 / 12.0, 7.0 / 12.0};
  EXPECT_TRUE(arc_membership(arcs, lattice));
  const std::vector<double> between = {1.0 / 24.0, 0.0};
  EXPECT_FALSE(arc_membership(arcs, between));
  const auto cover = FrequencyArcs::make(SimplexConfig::unit_edge(1), 1, 1);
  EXPECT_TRUE(cover.covers_torus());
  EXPECT_TRUE(arc_membership(cover, between));
  const std::int64_t a[] = {5, 7};
  EXPECT_TRUE(arcs.contains_grid(a, 12));
  EXPECT_THROW(arcs.contains_grid(a, 0), UsageError);
}

TEST(Arcs, NestingAndFloatAgreement) {
  const auto s = wide(1);
  for (int j = 0; j <= 2; ++j) {
    for (int l = 1; l <= 8; ++l) {
      const auto outer = FrequencyArcs::make(s, l, j);
      const auto inner = FrequencyArcs::make(s, l + 1, j);
      for (std::int64_t a = 0; a < 960; ++a) {
        const std::int64_t idx[] = {a};
        if (inner.contains_grid(idx, 960)) ASSERT_TRUE(outer.contains_grid(idx, 960));
        const std::vector<double> xi = {static_cast<double>(a) / 960.0};
        ASSERT_EQ(outer.contains(xi), outer.contains_grid(idx, 960)) << l << " " << j << " " << a;
      }
    }
  }
}

TEST(Decompose, TelescopingMultipliers) {
  EXPECT_EQ(band_count(1), 0);
  EXPECT_EQ(band_count(3), 1);
  EXPECT_EQ(band_count(8), 3);
  EXPECT_EQ(band_count(17), 4);
  EXPECT_THROW(band_count(0), UsageError);
  for (int n : {1, 2}) {
    const auto s = wide(n);
    for (int l : {1, 4, 8, 16, 20}) {
      const int period = n == 1 ? 840 : 24;
      const auto m = decomposition_multipliers(s, l, period, n);
      for (std::size_t i = 0; i < m.low.size(); ++i) ASSERT_NEAR(m.low[i] + m.middle[i] + m.high[i], 1.0, 1e-12);
    }
  }
}

TEST(Decompose, SumsToInputAndBands) {
  const auto s = wide(2);
  GeneratorSpec g;
  g.period = 24;
  g.dim = 2;
  const auto f = random_test_function(5, g);
  for (int l : {1, 3, 8, 17}) {
    const auto d = decompose(f, s, l);
    for (std::size_t i = 0; i < f.size(); ++i) ASSERT_NEAR(std::abs(d.f1[i] + d.f2[i] + d.f3[i] - f[i]), 0.0, 1e-12);
  }
  const auto d8 = decompose(f, s, 8);
  EXPECT_EQ(d8.bands, 3);
  EXPECT_EQ(d8.top_index, 1);
  // l = 8: the middle band is the single j = 0 increment.
  const auto m = decomposition_multipliers(s, 8, 24, 2);
  const auto p0 = grid_multiplier_Psi(s, 8, 0, 24);
  const auto p1 = grid_multiplier_Psi(s, 8, 1, 24);
  for (std::size_t i = 0; i < p0.size(); ++i) EXPECT_EQ(m.middle[i], p1[i] - p0[i]);
  EXPECT_THROW(decompose(f, wide(1), 8), UsageError);
}

TEST(Decompose, HighBandVanishesOnInnerArcs) {
  const auto s = wide(1);
  GeneratorSpec g;
  g.period = 96;
  g.dim = 1;
  const auto f = random_test_function(8, g);
  for (int l : {8, 16}) {
    const auto d = decompose(f, s, l);
    const auto spec = dft_forward(d.f3);
    const auto arcs = FrequencyArcs::make(s, l, d.top_index);
    for (std::int64_t a = 0; a < 96; ++a) {
      const std::int64_t idx[] = {a};
      if (arcs.contains_grid(idx, 96, 1)) ASSERT_LT(std::abs(spec.coefficients[static_cast<std::size_t>(a)]), 1e-12);
    }
  }
}

TEST(SquareSum, ZeroRowMonotoneAndOffArcs) {
  const auto s = wide(1);
  const std::vector<double> zero = {0.0};
  for (int j = 1; j <= 2; ++j) {
    for (double v : square_sum_delta(s, j, zero, 20)) EXPECT_EQ(v, 0.0);
  }
  PortableRng rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> xi = {rng.uniform()};
    const auto p = square_sum_delta(s, 1, xi, 24);
    ASSERT_EQ(p.size(), 23u);
    for (std::size_t i = 1; i < p.size(); ++i) ASSERT_GE(p[i], p[i - 1]);
    const auto arcs = FrequencyArcs::make(s, 2, 1);
    if (!arcs.contains(xi)) ASSERT_EQ(p.back(), 0.0);
  }
  EXPECT_THROW(square_sum_delta(s, 2, zero, 3), UsageError);
}
