#include "simplexvar/variation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "simplexvar/errors.hpp"
#include "simplexvar/kernels.hpp"

namespace simplexvar {

namespace {

constexpr std::size_t kMaxFamily = 64;

template <class T>
double v_r_impl(std::span<const T> a, double r) {
  if (!(r > 0.0)) throw UsageError("v_r needs r > 0");
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  if (std::isinf(r)) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, std::abs(a[j] - a[i]));
    }
    return best;
  }
  // best[j]: largest sum of |increment|^r over subsequences ending at j.
  std::array<double, kMaxFamily> small{};
  std::vector<double> large;
  double* best = small.data();
  if (n > kMaxFamily) {
    large.assign(n, 0.0);
    best = large.data();
  }
  best[0] = 0.0;
  double top = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) b = std::max(b, best[i] + std::pow(std::abs(a[j] - a[i]), r));
    best[j] = b;
    top = std::max(top, b);
  }
  return std::pow(top, 1.0 / r);
}

template <class Fn>
DenseGrid pointwise(std::span<const DenseGrid> family, Exec exec, Fn&& fn) {
  if (family.empty()) throw UsageError("empty family");
  const std::size_t len = family.size();
  if (len > kMaxFamily) throw UsageError("family longer than 64 scales");
  for (const auto& g : family) {
    if (!g.same_shape(family.front())) throw UsageError("family grids differ in shape");
  }
  DenseGrid out(family.front().period(), family.front().dim());
  auto dst = out.values();
  kernels::for_each_index(out.size(), exec, [&](std::size_t i) {
    std::array<cplx, kMaxFamily> buf;
    for (std::size_t l = 0; l < len; ++l) buf[l] = family[l][i];
    dst[i] = fn(std::span<const cplx>(buf.data(), len));
  });
  return out;
}

template <class Fn>
DenseGrid pointwise_real(std::span<const DenseGrid> family, Exec exec, Fn&& fn) {
  const std::size_t len = family.size();
  return pointwise(family, exec, [&](std::span<const cplx> seq) {
    std::array<double, kMaxFamily> buf;
    for (std::size_t l = 0; l < len; ++l) buf[l] = seq[l].real();
    return fn(std::span<const double>(buf.data(), len));
  });
}

}  // namespace

void SampleSequence::validate() const {
  if (values.size() != scales.size()) throw UsageError("sample sequence: values and scales differ in length");
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (!(scales[i] > scales[i - 1])) throw UsageError("sample sequence: scales must increase strictly");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw UsageError("sample sequence: non-finite value");
  }
}

double v_r(std::span<const double> a, double r) { return v_r_impl(a, r); }
double v_r(std::span<const cplx> a, double r) { return v_r_impl(a, r); }

std::size_t jump_count(std::span<const double> a, double lam) {
  if (!(lam > 0.0)) throw UsageError("jump_count needs lam > 0");
  std::size_t count = 0;
  if (a.empty()) return 0;
  double lo = a[0];
  double hi = a[0];
  for (std::size_t v = 1; v < a.size(); ++v) {
    if (a[v] - lo > lam || hi - a[v] > lam) {
      ++count;
      lo = hi = a[v];
    } else {
      lo = std::min(lo, a[v]);
      hi = std::max(hi, a[v]);
    }
  }
  return count;
}

std::size_t jump_count(std::span<const cplx> a, double lam) {
  if (!(lam > 0.0)) throw UsageError("jump_count needs lam > 0");
  std::size_t count = 0;
  std::size_t start = 0;
  for (std::size_t v = 1; v < a.size(); ++v) {
    for (std::size_t u = start; u < v; ++u) {
      if (std::abs(a[v] - a[u]) > lam) {
        ++count;
        start = v;
        break;
      }
    }
  }
  return count;
}

AverageFamily average_family(const DenseGrid& f, const SimplexConfig& simplex, std::span<const std::int64_t> dilations,
                             const CopySetProvider& provider, Exec exec,
                             const std::function<void(const std::string&)>& log) {
  if (dilations.empty()) throw UsageError("scale list is empty");
  for (std::size_t i = 0; i < dilations.size(); ++i) {
    if (dilations[i] < 1) throw UsageError("dilations must be >= 1");
    if (i > 0 && dilations[i] <= dilations[i - 1]) throw UsageError("dilations must increase strictly");
  }
  AverageFamily family;
  family.real_valued = std::all_of(f.values().begin(), f.values().end(), [](const cplx& v) { return v.imag() == 0.0; });
  const SpectralAverager spectral(f);
  for (const std::int64_t lambda : dilations) {
    const CopySet copies = provider ? provider(simplex, lambda * lambda) : enumerate_simplex_copies(simplex, lambda * lambda);
    if (copies.empty()) {
      family.skipped.push_back(lambda);
      if (log) log("skipping dilation " + std::to_string(lambda) + ": no isometric copies");
      continue;
    }
    const AverageKernel kernel = average_kernel(copies);
    DenseGrid avg = prefer_spectral(kernel.base.count(), f.size())
                        ? spectral.apply(kernel)
                        : simplex_average(f, kernel, AveragePath::direct, exec);
    // A real kernel maps real data to real data; drop transform round-off.
    if (family.real_valued) {
      for (auto& v : avg.values()) v = v.real();
    }
    family.dilations.push_back(lambda);
    family.averages.push_back(std::move(avg));
  }
  return family;
}

DenseGrid variation_field(const AverageFamily& family, double r, Exec exec) {
  if (!(r > 0.0)) throw UsageError("v_r needs r > 0");
  if (family.real_valued) {
    return pointwise_real(family.averages, exec, [r](std::span<const double> s) { return v_r(s, r); });
  }
  return pointwise(family.averages, exec, [r](std::span<const cplx> s) { return v_r(s, r); });
}

DenseGrid variation_field(const DenseGrid& f, const SimplexConfig& simplex, std::span<const std::int64_t> dilations,
                          double r, Exec exec) {
  return variation_field(average_family(f, simplex, dilations, {}, exec), r, exec);
}

JumpField jump_field_of(std::span<const DenseGrid> family, double lam, Exec exec) {
  if (!(lam > 0.0)) throw UsageError("jump_count needs lam > 0");
  const bool real = std::all_of(family.begin(), family.end(), [](const DenseGrid& g) {
    return std::all_of(g.values().begin(), g.values().end(), [](const cplx& v) { return v.imag() == 0.0; });
  });
  JumpField out;
  if (real) {
    out.counts = pointwise_real(family, exec, [lam](std::span<const double> s) {
      return static_cast<double>(jump_count(s, lam));
    });
  } else {
    out.counts = pointwise(family, exec, [lam](std::span<const cplx> s) {
      return static_cast<double>(jump_count(s, lam));
    });
  }
  out.scaled = DenseGrid(out.counts.period(), out.counts.dim());
  auto src = out.counts.values();
  auto dst = out.scaled.values();
  kernels::for_each_index(out.counts.size(), exec, [&](std::size_t i) { dst[i] = lam * std::sqrt(src[i].real()); });
  return out;
}

JumpField jump_field(const AverageFamily& family, double lam, Exec exec) {
  return jump_field_of(family.averages, lam, exec);
}

JumpField jump_field(const DenseGrid& f, const SimplexConfig& simplex, std::span<const std::int64_t> dilations,
                     double lam, Exec exec) {
  return jump_field(average_family(f, simplex, dilations, {}, exec), lam, exec);
}

DenseGrid lacunary_maximal_field(const AverageFamily& family, Exec exec) {
  return pointwise(family.averages, exec, [](std::span<const cplx> s) {
    double best = 0.0;
    for (const cplx& v : s) best = std::max(best, std::abs(v));
    return best;
  });
}

DenseGrid lacunary_maximal_field(const DenseGrid& f, const SimplexConfig& simplex,
                                 std::span<const std::int64_t> dilations, Exec exec) {
  return lacunary_maximal_field(average_family(f, simplex, dilations, {}, exec), exec);
}

DenseGrid square_function_field(const AverageFamily& family, Exec exec) {
  return pointwise(family.averages, exec, [](std::span<const cplx> s) {
    double acc = 0.0;
    for (const cplx& v : s) acc += std::norm(v);
    return std::sqrt(acc);
  });
}

}  // namespace simplexvar
