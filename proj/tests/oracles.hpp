#pragma once

// Slow, obviously-correct reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "simplexvar/grid_functions.hpp"
#include "simplexvar/lattice_geometry.hpp"

namespace oracle {

using simplexvar::cplx;
using simplexvar::IntVec;

// Jacobi: r_4(m) = 8 * sum of divisors of m not divisible by 4.
inline std::uint64_t jacobi_r4(std::int64_t m) {
  if (m == 0) return 1;
  std::uint64_t s = 0;
  for (std::int64_t d = 1; d <= m; ++d) {
    if (m % d == 0 && d % 4 != 0) s += static_cast<std::uint64_t>(d);
  }
  return 8 * s;
}

// All points of the box [-R, R]^n bucketed by |y|^2 <= m_max, lexicographic within a bucket.
inline std::vector<std::vector<IntVec>> box_spheres(int n, std::int64_t m_max) {
  std::int64_t r = 0;
  while ((r + 1) * (r + 1) <= m_max) ++r;
  std::vector<std::vector<IntVec>> out(static_cast<std::size_t>(m_max + 1));
  IntVec y(static_cast<std::size_t>(n), -r);
  while (true) {
    std::int64_t s = 0;
    for (auto v : y) s += v * v;
    if (s <= m_max) out[static_cast<std::size_t>(s)].push_back(y);
    int i = n - 1;
    while (i >= 0 && y[static_cast<std::size_t>(i)] == r) y[static_cast<std::size_t>(i--)] = -r;
    if (i < 0) break;
    ++y[static_cast<std::size_t>(i)];
  }
  return out;
}

inline std::int64_t dist_sq(const IntVec& a, const IntVec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// k = 2 copies from a pairwise scan of two sphere lists, concatenated coordinates, sorted.
inline std::vector<IntVec> pair_copies(const std::vector<std::vector<IntVec>>& spheres, const simplexvar::SimplexConfig& s,
                                       std::int64_t lambda_sq) {
  std::vector<IntVec> out;
  const auto r1 = static_cast<std::size_t>(lambda_sq * s.dist_sq(0, 1));
  const auto r2 = static_cast<std::size_t>(lambda_sq * s.dist_sq(0, 2));
  const std::int64_t d12 = lambda_sq * s.dist_sq(1, 2);
  for (const auto& a : spheres.at(r1)) {
    for (const auto& b : spheres.at(r2)) {
      if (dist_sq(a, b) == d12) {
        IntVec row = a;
        row.insert(row.end(), b.begin(), b.end());
        out.push_back(std::move(row));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<IntVec> rows_of(const simplexvar::CopySet& set) {
  std::vector<IntVec> out;
  for (std::size_t i = 0; i < set.count(); ++i) {
    auto p = set.point(i);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

// O(N^{2 dim}) transform with the same sign and scaling conventions as the library.
inline std::vector<cplx> naive_dft(const std::vector<cplx>& values, int period, int dim, bool inverse) {
  const std::size_t size = values.size();
  std::vector<cplx> out(size);
  const double sign = inverse ? 1.0 : -1.0;
  auto coords = [&](std::size_t idx) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(dim));
    for (int d = dim - 1; d >= 0; --d) {
      c[static_cast<std::size_t>(d)] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(period));
      idx /= static_cast<std::size_t>(period);
    }
    return c;
  };
  for (std::size_t a = 0; a < size; ++a) {
    const auto ca = coords(a);
    cplx acc = 0.0;
    for (std::size_t x = 0; x < size; ++x) {
      const auto cx = coords(x);
      std::int64_t dot = 0;
      for (int d = 0; d < dim; ++d) dot += ca[static_cast<std::size_t>(d)] * cx[static_cast<std::size_t>(d)];
      const double phase = sign * 2.0 * std::numbers::pi * static_cast<double>(dot % period) / period;
      acc += values[x] * std::polar(1.0, phase);
    }
    out[a] = acc;
  }
  if (inverse) {
    for (auto& v : out) v /= static_cast<double>(size);
  }
  return out;
}

// Exhaustive r-variation over all 2^L index subsets.
template <class T>
double variation(const std::vector<T>& a, double r) {
  const std::size_t n = a.size();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double acc = 0.0;
    long prev = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      if (prev >= 0) {
        const double d = std::abs(a[i] - a[static_cast<std::size_t>(prev)]);
        acc = std::isinf(r) ? std::max(acc, d) : acc + std::pow(d, r);
      }
      prev = static_cast<long>(i);
    }
    best = std::max(best, acc);
  }
  return std::isinf(r) ? best : std::pow(best, 1.0 / r);
}

// Longest chain u1 < v1 <= u2 < v2 <= ... with |a_v - a_u| > lam, by memoized search over all pairs.
template <class T>
std::size_t jumps(const std::vector<T>& a, double lam) {
  const std::size_t n = a.size();
  std::vector<std::size_t> best(n + 1, 0);  // best[p]: chains using indices >= p
  for (std::size_t p = n; p-- > 0;) {
    std::size_t b = best[p + 1];
    for (std::size_t u = p; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (std::abs(a[v] - a[u]) > lam) b = std::max(b, 1 + best[v]);
      }
    }
    best[p] = b;
  }
  return best[0];
}

}  // namespace oracle
