#include "simplexvar/dyadic.hpp"

#include <map>
#include <string>

#include "simplexvar/errors.hpp"
#include "simplexvar/kernels.hpp"

namespace simplexvar {

namespace {

constexpr std::int64_t kMaxSide = std::int64_t{1} << 40;
constexpr std::uint64_t kMaxSparseCells = 50'000'000;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void check_level(const DyadicScheme& scheme, int l) {
  if (l < 0 || l > scheme.max_level) {
    throw UsageError("dyadic level " + std::to_string(l) + " outside [0, " + std::to_string(scheme.max_level) + "]");
  }
}

}  // namespace

DyadicScheme::DyadicScheme(std::int64_t b, int d) : base(b), dim(d) {
  if (b < 2) throw UsageError("dyadic base must be >= 2");
  if (d < 1) throw UsageError("dyadic dimension must be >= 1");
  std::int64_t s = 1;
  while (s <= kMaxSide / b) {
    s *= b;
    ++max_level;
  }
}

DyadicScheme DyadicScheme::for_simplex(const SimplexConfig& simplex) {
  // ceil(2|s|) = ceil(sqrt(4 |s|^2)).
  const std::int64_t four = 4 * simplex.norm_sq();
  std::int64_t b = isqrt(four);
  if (b * b < four) ++b;
  return DyadicScheme(std::max<std::int64_t>(b, 2), simplex.dim());
}

std::int64_t DyadicScheme::side(int l) const {
  check_level(*this, l);
  std::int64_t s = 1;
  for (int i = 0; i < l; ++i) s *= base;
  return s;
}

IntVec DyadicScheme::cube_index(std::span<const std::int64_t> x, int l) const {
  const std::int64_t s = side(l);
  IntVec t(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) t[i] = floor_div(x[i], s);
  return t;
}

int DyadicScheme::top_level(int period) const {
  int l = 0;
  std::int64_t s = 1;
  while (l < max_level && period % (s * base) == 0) {
    s *= base;
    ++l;
  }
  return l;
}

DenseGrid conditional_expectation(const DenseGrid& f, const DyadicScheme& scheme, int l, Exec exec) {
  if (f.dim() != scheme.dim) throw UsageError("grid dimension does not match the dyadic scheme");
  const std::int64_t s = scheme.side(l);
  if (f.period() % s != 0) {
    throw UsageError("cube side " + std::to_string(s) + " does not divide grid period " + std::to_string(f.period()));
  }
  // Level by level: each stage merges B cubes of the previous level per axis.
  DenseGrid out = f;
  std::int64_t sub = 1;
  for (int stage = 1; stage <= l; ++stage) {
    for (int axis = 0; axis < f.dim(); ++axis) kernels::block_merge_axis(out, axis, sub, scheme.base, exec);
    sub *= scheme.base;
  }
  return out;
}

SparseFunction conditional_expectation(const SparseFunction& f, const DyadicScheme& scheme, int l) {
  if (f.dim() != scheme.dim) throw UsageError("function dimension does not match the dyadic scheme");
  const std::int64_t s = scheme.side(l);
  if (s == 1) return f;
  std::map<IntVec, cplx> sums;
  for (const auto& [x, v] : f.entries()) sums[scheme.cube_index(x, l)] += v;
  std::uint64_t cell = 1;
  for (int i = 0; i < f.dim(); ++i) {
    if (cell > kMaxSparseCells / static_cast<std::uint64_t>(s)) throw CapacityError("dyadic cube too large to expand");
    cell *= static_cast<std::uint64_t>(s);
  }
  if (cell * sums.size() > kMaxSparseCells) throw CapacityError("sparse conditional expectation too large to expand");
  const double inv = 1.0 / static_cast<double>(cell);
  SparseFunction out(f.dim());
  IntVec x(f.dim());
  IntVec offset(f.dim(), 0);
  for (const auto& [t, total] : sums) {
    const cplx mean = total * inv;
    std::fill(offset.begin(), offset.end(), 0);
    for (std::uint64_t c = 0; c < cell; ++c) {
      for (int i = 0; i < f.dim(); ++i) x[i] = t[i] * s + offset[i];
      out.set(x, mean);
      for (int i = f.dim() - 1; i >= 0; --i) {
        if (++offset[i] < s) break;
        offset[i] = 0;
      }
    }
  }
  return out;
}

DenseGrid martingale_difference(const DenseGrid& f, const DyadicScheme& scheme, int m, Exec exec) {
  if (m < 1) throw UsageError("martingale difference needs m >= 1");
  const DenseGrid fine = conditional_expectation(f, scheme, m - 1, exec);
  DenseGrid coarse = conditional_expectation(fine, scheme, m, exec);
  auto c = coarse.values();
  auto g = fine.values();
  kernels::for_each_index(coarse.size(), exec, [&](std::size_t i) { c[i] -= g[i]; });
  return coarse;
}

SparseFunction martingale_difference(const SparseFunction& f, const DyadicScheme& scheme, int m) {
  if (m < 1) throw UsageError("martingale difference needs m >= 1");
  SparseFunction out = conditional_expectation(f, scheme, m);
  const SparseFunction fine = conditional_expectation(f, scheme, m - 1);
  for (const auto& [x, v] : fine.entries()) out.add(x, -v);
  return out;
}

JumpField martingale_jump_field(const DenseGrid& f, const DyadicScheme& scheme, std::span<const int> levels, double lam,
                                Exec exec) {
  if (levels.empty()) throw UsageError("level list is empty");
  std::vector<DenseGrid> family;
  family.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0 && levels[i] <= levels[i - 1]) throw UsageError("levels must increase strictly");
    family.push_back(conditional_expectation(f, scheme, levels[i], exec));
  }
  return jump_field_of(family, lam, exec);
}

}  // namespace simplexvar
