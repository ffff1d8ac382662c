#include "simplexvar/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simplexvar/errors.hpp"
#include "simplexvar/kernels.hpp"

namespace simplexvar {

SparseFunction AverageKernel::as_sparse() const {
  SparseFunction out(base.dim());
  for (std::size_t i = 0; i < base.count(); ++i) {
    auto p = base.point(i);
    out.set(IntVec(p.begin(), p.end()), weight);
  }
  return out;
}

std::int64_t AverageKernel::diameter() const {
  const int dim = base.dim();
  std::int64_t best = 0;
  for (int a = 0; a < dim; ++a) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (std::size_t i = 0; i < base.count(); ++i) {
      const std::int64_t v = base.point(i)[static_cast<std::size_t>(a)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (base.count() > 0) best = std::max(best, hi - lo);
  }
  return best;
}

AverageKernel average_kernel(CopySet copies) {
  if (copies.empty()) {
    throw EmptyCopySet("no isometric copies at lambda_sq = " + std::to_string(copies.lambda_sq));
  }
  AverageKernel out;
  out.weight = 1.0 / static_cast<double>(copies.count());
  out.base = std::move(copies);
  return out;
}

AverageKernel average_kernel(const SimplexConfig& simplex, std::int64_t lambda_sq, const CopySetProvider& provider) {
  return average_kernel(provider ? provider(simplex, lambda_sq) : enumerate_simplex_copies(simplex, lambda_sq));
}

bool prefer_spectral(std::size_t kernel_points, std::size_t grid_points) {
  const double log_size = std::log2(static_cast<double>(std::max<std::size_t>(grid_points, 2)));
  return static_cast<double>(kernel_points) > 8.0 * log_size;
}

Spectrum kernel_spectrum(const AverageKernel& kernel, int period) {
  DenseGrid scattered(period, kernel.base.dim());
  for (std::size_t i = 0; i < kernel.base.count(); ++i) scattered[scattered.index_of(kernel.base.point(i))] += 1.0;
  Spectrum s = dft_forward(scattered);
  for (auto& c : s.coefficients) c *= kernel.weight;
  return s;
}

SpectralAverager::SpectralAverager(const DenseGrid& f) : spectrum_(dft_forward(f)) {}

DenseGrid SpectralAverager::apply(const AverageKernel& kernel) const {
  if (kernel.base.dim() != spectrum_.dim) throw UsageError("kernel dimension does not match grid");
  Spectrum s = kernel_spectrum(kernel, spectrum_.period);
  for (std::size_t i = 0; i < s.coefficients.size(); ++i) s.coefficients[i] *= spectrum_.coefficients[i];
  return dft_inverse(s);
}

DenseGrid SpectralAverager::apply_multiplier(const std::vector<cplx>& multiplier) const {
  if (multiplier.size() != spectrum_.coefficients.size()) throw UsageError("multiplier size does not match grid");
  Spectrum s = spectrum_;
  for (std::size_t i = 0; i < multiplier.size(); ++i) s.coefficients[i] *= multiplier[i];
  return dft_inverse(s);
}

DenseGrid simplex_average(const DenseGrid& f, const AverageKernel& kernel, AveragePath path, Exec exec) {
  if (kernel.base.dim() != f.dim()) throw UsageError("simplex_average: grid dimension must equal n*k");
  if (path == AveragePath::automatic) {
    path = prefer_spectral(kernel.base.count(), f.size()) ? AveragePath::spectral : AveragePath::direct;
  }
  if (path == AveragePath::spectral) return SpectralAverager(f).apply(kernel);
  DenseGrid out;
  kernels::convolve_uniform(f, kernel.base.coords, kernel.weight, out, exec);
  return out;
}

DenseGrid simplex_average(const DenseGrid& f, const SimplexConfig& simplex, std::int64_t lambda_sq, AveragePath path,
                          Exec exec) {
  return simplex_average(f, average_kernel(simplex, lambda_sq), path, exec);
}

SparseFunction simplex_average(const SparseFunction& f, const SimplexConfig& simplex, std::int64_t lambda_sq) {
  const AverageKernel kernel = average_kernel(simplex, lambda_sq);
  if (f.dim() != kernel.base.dim()) throw UsageError("simplex_average: dimension must equal n*k");
  return convolve(f, kernel.as_sparse());
}

DenseGrid spherical_average(const DenseGrid& f, int n, std::int64_t lambda_sq, AveragePath path, Exec exec) {
  if (lambda_sq < 0) throw UsageError("lambda_sq must be non-negative");
  if (f.dim() != n) throw UsageError("spherical_average: grid dimension must equal n");
  if (lambda_sq == 0) return f;
  return simplex_average(f, SimplexConfig::unit_edge(n), lambda_sq, path, exec);
}

SmoothedKernel smoothed_kernel(const SimplexConfig& simplex, int l, int period, const PsiSpec& psi,
                               const CopySetProvider& provider) {
  if (l < 0) throw UsageError("smoothed_kernel needs l >= 0");
  if (psi.dim != simplex.dim()) throw UsageError("psi dimension must equal n*k");
  const std::int64_t dilation = std::int64_t{1} << l;
  const AverageKernel w = average_kernel(simplex, dilation * dilation, provider);
  SmoothedKernel out;
  out.multiplier = kernel_spectrum(w, period);
  const auto bump = grid_multiplier_Psi(simplex, l, 0, period);
  for (std::size_t i = 0; i < bump.size(); ++i) out.multiplier.coefficients[i] *= bump[i];
  out.wraparound = static_cast<double>(period) <= 2.0 * static_cast<double>(dilation) * simplex.norm();
  out.width_below_step = MultiplierSpec::make(simplex, l, 0).width_below_step();
  return out;
}

LocalSupResult local_sup_average(const DenseGrid& f, const SimplexConfig& simplex, int l, int stride,
                                 const CopySetProvider& provider, Exec exec) {
  if (l < 0 || l > 14) throw UsageError("local_sup_average needs 0 <= l <= 14");
  if (stride < 1) throw UsageError("stride must be >= 1");
  if (f.dim() != simplex.dim()) throw UsageError("local_sup_average: grid dimension must equal n*k");
  const std::int64_t lo = std::int64_t{1} << (2 * l);
  const std::int64_t hi = std::int64_t{1} << (2 * l + 2);

  LocalSupResult out;
  out.values = DenseGrid(f.period(), f.dim());

  std::vector<std::uint64_t> sphere_counts;
  if (simplex.k() == 1) sphere_counts = representation_counts(simplex.n(), hi * simplex.dist_sq(0, 1));

  const SpectralAverager spectral(f);
  auto dst = out.values.values();
  auto accumulate = [&](const AverageKernel& kernel) {
    const DenseGrid avg = prefer_spectral(kernel.base.count(), f.size())
                              ? spectral.apply(kernel)
                              : simplex_average(f, kernel, AveragePath::direct, exec);
    auto src = avg.values();
    kernels::for_each_index(f.size(), exec, [&](std::size_t i) {
      const double m = std::abs(src[i]);
      if (m > dst[i].real()) dst[i] = m;
    });
  };

  std::size_t admissible = 0;
  for (std::int64_t lambda_sq = lo; lambda_sq <= hi; ++lambda_sq) {
    bool nonempty = false;
    CopySet copies;
    if (simplex.k() == 1) {
      nonempty = sphere_counts[static_cast<std::size_t>(lambda_sq * simplex.dist_sq(0, 1))] > 0;
    } else {
      copies = provider ? provider(simplex, lambda_sq) : enumerate_simplex_copies(simplex, lambda_sq);
      nonempty = !copies.empty();
    }
    if (!nonempty) {
      ++out.skipped_empty;
      if (out.skipped_sample.size() < 16) out.skipped_sample.push_back(lambda_sq);
      continue;
    }
    if (admissible++ % static_cast<std::size_t>(stride) != 0) continue;
    if (simplex.k() == 1) copies = provider ? provider(simplex, lambda_sq) : enumerate_simplex_copies(simplex, lambda_sq);
    out.used.push_back(lambda_sq);
    accumulate(average_kernel(std::move(copies)));
  }
  out.empty_range = out.used.empty();
  return out;
}

}  // namespace simplexvar
