#include "simplexvar/littlewood_paley.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numeric>

#include "simplexvar/errors.hpp"

namespace simplexvar {

namespace {

using boost::multiprecision::cpp_int;

cpp_int ipow(cpp_int base, int e) {
  cpp_int out = 1;
  while (e-- > 0) out *= base;
  return out;
}

// Reduces xi to [-1/2, 1/2).
double torus_reduce(double xi) { return xi - std::floor(xi + 0.5); }

}  // namespace

std::uint64_t lcm_t(int j) {
  if (j < 0) throw UsageError("lcm_t needs j >= 0");
  if (j > 5) throw CapacityError("t_j = lcm{1..2^j} overflows 64 bits for j >= 6");
  std::uint64_t acc = 1;
  const std::uint64_t top = std::uint64_t{1} << j;
  for (std::uint64_t m = 2; m <= top; ++m) acc = std::lcm(acc, m);
  return acc;
}

double transition_sigma(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double psi_hat1(double t) {
  const double a = std::abs(t);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  return transition_sigma(2.0 * (1.0 - a));
}

double psi_hat(std::span<const double> xi) {
  double out = 1.0;
  for (double v : xi) {
    out *= psi_hat1(v);
    if (out == 0.0) break;
  }
  return out;
}

double PsiSpec::operator()(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != dim) throw UsageError("psi: frequency has wrong dimension");
  return psi_hat(xi);
}

double multiplier_psi_axis(std::uint64_t step, double width, double xi) {
  if (step < 1 || !(width > 0.0)) throw UsageError("multiplier_psi needs step >= 1 and width > 0");
  const auto t = static_cast<double>(step);
  const double c = t * torus_reduce(xi);
  const double reach = t / width;  // psi_hat1 vanishes once |x + c| >= reach
  const auto lo = static_cast<std::int64_t>(std::ceil(-c - reach));
  const auto hi = static_cast<std::int64_t>(std::floor(-c + reach));
  const double scale = width / t;
  double acc = 0.0;
  for (std::int64_t x = lo; x <= hi; ++x) acc += psi_hat1(scale * (static_cast<double>(x) + c));
  return acc;
}

double multiplier_psi(std::uint64_t step, double width, std::span<const double> xi) {
  double out = 1.0;
  for (double v : xi) {
    out *= multiplier_psi_axis(step, width, v);
    if (out == 0.0) break;
  }
  return out;
}

MultiplierSpec MultiplierSpec::make(const SimplexConfig& simplex, int l, int j) {
  if (l < 0 || j < 0) throw UsageError("multiplier needs l, j >= 0");
  MultiplierSpec m;
  m.l = l;
  m.j = j;
  m.step = lcm_t(j);
  m.norm_s = simplex.norm();
  m.width = std::pow(2.0 * m.norm_s, l - j);
  return m;
}

double multiplier_Psi(const SimplexConfig& simplex, int l, int j, std::span<const double> xi) {
  const auto m = MultiplierSpec::make(simplex, l, j);
  return multiplier_psi(m.step, m.width, xi);
}

double multiplier_DeltaPsi(const SimplexConfig& simplex, int l, int j, std::span<const double> xi) {
  return multiplier_Psi(simplex, l, j + 1, xi) - multiplier_Psi(simplex, l, j, xi);
}

double multiplier_scale_increment(const SimplexConfig& simplex, int l, int j, std::span<const double> xi) {
  return multiplier_Psi(simplex, l + 1, j, xi) - multiplier_Psi(simplex, l, j, xi);
}

FrequencyArcs FrequencyArcs::make(const SimplexConfig& simplex, int l, int j) {
  FrequencyArcs arcs;
  arcs.l = l;
  arcs.j = j;
  arcs.norm_sq = simplex.norm_sq();
  arcs.step = lcm_t(j);
  return arcs;
}

double FrequencyArcs::half_width() const {
  return std::pow(2.0 * std::sqrt(static_cast<double>(norm_sq)), j - l);
}

bool FrequencyArcs::contains(std::span<const double> xi) const {
  const double hw = half_width();
  const auto t = static_cast<double>(step);
  for (double v : xi) {
    const double scaled = t * v;
    const double dist = std::abs(scaled - std::round(scaled)) / t;
    if (dist > hw) return false;
  }
  return true;
}

bool FrequencyArcs::contains_grid(std::span<const std::int64_t> a, std::int64_t period, int halvings,
                                  int extra_exponent) const {
  if (period < 1) throw UsageError("grid period must be positive");
  const int e = j - l + extra_exponent;
  const cpp_int scale = cpp_int(4) * norm_sq;  // (2|s|)^2
  const cpp_int denom = cpp_int(period) * step;
  // dist = num / (N t); dist <= 2^{-h} (2|s|)^e  <=>  num^2 4^h <= (N t)^2 (4|s|^2)^e, with e moved across if negative.
  cpp_int rhs = denom * denom;
  cpp_int lhs_factor = ipow(4, halvings);
  if (e >= 0) {
    rhs *= ipow(scale, e);
  } else {
    lhs_factor *= ipow(scale, -e);
  }
  const auto t = static_cast<std::int64_t>(step);
  for (const std::int64_t ai : a) {
    const cpp_int prod = cpp_int(ai) * t;
    cpp_int r = prod % period;
    if (r < 0) r += period;
    const cpp_int num = r < period - r ? r : cpp_int(period) - r;
    if (num * num * lhs_factor > rhs) return false;
  }
  return true;
}

std::vector<double> axis_multiplier_table(std::uint64_t step, double width, int period) {
  std::vector<double> out(static_cast<std::size_t>(period));
  for (int a = 0; a < period; ++a) out[static_cast<std::size_t>(a)] = multiplier_psi_axis(step, width, static_cast<double>(a) / period);
  return out;
}

namespace {

std::vector<double> tensor_table(const std::vector<double>& axis, int period, int dim) {
  std::size_t size = 1;
  for (int d = 0; d < dim; ++d) size *= static_cast<std::size_t>(period);
  std::vector<double> out(size, 1.0);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t rest = i;
    double v = 1.0;
    for (int d = 0; d < dim; ++d) {
      v *= axis[rest % static_cast<std::size_t>(period)];
      rest /= static_cast<std::size_t>(period);
    }
    out[i] = v;
  }
  return out;
}

}  // namespace

std::vector<double> grid_multiplier_Psi(const SimplexConfig& simplex, int l, int j, int period) {
  const auto m = MultiplierSpec::make(simplex, l, j);
  return tensor_table(axis_multiplier_table(m.step, m.width, period), period, simplex.dim());
}

int band_count(int l) {
  if (l < 1) throw UsageError("band_count needs l >= 1");
  int j = 0;
  while ((2 << j) <= l) ++j;
  return j;
}

DecompositionMultipliers decomposition_multipliers(const SimplexConfig& simplex, int l, int period, int dim) {
  const int bands = band_count(l);
  const int top = std::max(bands - 2, 0);
  auto table = [&](int j) {
    const auto m = MultiplierSpec::make(simplex, l, j);
    return tensor_table(axis_multiplier_table(m.step, m.width, period), period, dim);
  };
  DecompositionMultipliers out;
  out.low = table(0);
  out.middle.assign(out.low.size(), 0.0);
  if (bands >= 3) {
    std::vector<double> lower = out.low;
    for (int j = 0; j <= bands - 3; ++j) {
      std::vector<double> upper = table(j + 1);
      for (std::size_t i = 0; i < upper.size(); ++i) out.middle[i] += upper[i] - lower[i];
      lower = std::move(upper);
    }
  }
  const std::vector<double> top_table = top == 0 ? out.low : table(top);
  out.high.resize(top_table.size());
  for (std::size_t i = 0; i < top_table.size(); ++i) out.high[i] = 1.0 - top_table[i];
  return out;
}

Decomposition decompose(const DenseGrid& f, const SimplexConfig& simplex, int l) {
  if (f.dim() != simplex.dim()) throw UsageError("decompose: grid dimension must equal n*k");
  const auto mult = decomposition_multipliers(simplex, l, f.period(), f.dim());
  const Spectrum spec = dft_forward(f);
  auto apply = [&](const std::vector<double>& m) {
    Spectrum s = spec;
    for (std::size_t i = 0; i < m.size(); ++i) s.coefficients[i] *= m[i];
    return dft_inverse(s);
  };
  Decomposition out;
  out.bands = band_count(l);
  out.top_index = std::max(out.bands - 2, 0);
  out.f1 = apply(mult.low);
  out.f2 = apply(mult.middle);
  out.f3 = apply(mult.high);
  return out;
}

std::vector<double> square_sum_delta(const SimplexConfig& simplex, int j, std::span<const double> xi, int l_max) {
  const int first = 1 << j;
  if (l_max < first) throw UsageError("square_sum_delta needs 2^j <= l_max");
  std::vector<double> partial;
  partial.reserve(static_cast<std::size_t>(l_max - first + 1));
  const std::uint64_t step = lcm_t(j);
  const double base = 2.0 * simplex.norm();
  double acc = 0.0;
  double current = multiplier_psi(step, std::pow(base, first - j), xi);
  for (int l = first; l <= l_max; ++l) {
    const double next = multiplier_psi(step, std::pow(base, l + 1 - j), xi);
    const double d = next - current;
    acc += d * d;
    partial.push_back(acc);
    current = next;
  }
  return partial;
}

}  // namespace simplexvar
