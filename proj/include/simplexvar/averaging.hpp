#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simplexvar/exec.hpp"
#include "simplexvar/grid_functions.hpp"
#include "simplexvar/lattice_geometry.hpp"
#include "simplexvar/littlewood_paley.hpp"

namespace simplexvar {

/// Uniform probability kernel w_{lambda S} on a non-empty copy set.
struct AverageKernel {
  CopySet base;
  double weight = 0.0;  // 1 / |S_{lambda S}|

  SparseFunction as_sparse() const;
  // Largest per-axis extent of the support.
  std::int64_t diameter() const;
};

// Throws EmptyCopySet when the dilation has no copies.
AverageKernel average_kernel(const SimplexConfig& simplex, std::int64_t lambda_sq, const CopySetProvider& provider = {});
AverageKernel average_kernel(CopySet copies);

enum class AveragePath { automatic, direct, spectral };

/// A_{lambda S} f(x) = |S|^{-1} sum_{y in S_{lambda S}} f(x - y) on the periodic grid.
DenseGrid simplex_average(const DenseGrid& f, const AverageKernel& kernel, AveragePath path = AveragePath::automatic,
                          Exec exec = Exec::parallel);
DenseGrid simplex_average(const DenseGrid& f, const SimplexConfig& simplex, std::int64_t lambda_sq,
                          AveragePath path = AveragePath::automatic, Exec exec = Exec::parallel);
// Exact, non-periodic.
SparseFunction simplex_average(const SparseFunction& f, const SimplexConfig& simplex, std::int64_t lambda_sq);

/// M_lambda with lambda_sq = |y|^2; lambda_sq = 0 is the identity.
DenseGrid spherical_average(const DenseGrid& f, int n, std::int64_t lambda_sq, AveragePath path = AveragePath::automatic,
                            Exec exec = Exec::parallel);

/// Fourier transform of the kernel at the grid frequencies,
/// |S|^{-1} sum_y e(-y.a/N).
Spectrum kernel_spectrum(const AverageKernel& kernel, int period);

/// Applies several kernels to one function, transforming f once.
class SpectralAverager {
 public:
  explicit SpectralAverager(const DenseGrid& f);
  DenseGrid apply(const AverageKernel& kernel) const;
  DenseGrid apply_multiplier(const std::vector<cplx>& multiplier) const;
  const Spectrum& spectrum() const { return spectrum_; }

 private:
  Spectrum spectrum_;
};

// Spectral when direct summation would cost more than a few transforms.
bool prefer_spectral(std::size_t kernel_points, std::size_t grid_points);

/// (Psi^s_{l,0} * w_{2^l S}) on the grid: its multiplier, the product of the
/// smooth bump's torus multiplier and the kernel spectrum.
struct SmoothedKernel {
  Spectrum multiplier;
  bool wraparound = false;   // N <= 2 * 2^l |s|
  bool width_below_step = false;

  DenseGrid space() const { return dft_inverse(multiplier); }
};

SmoothedKernel smoothed_kernel(const SimplexConfig& simplex, int l, int period, const PsiSpec& psi,
                               const CopySetProvider& provider = {});

struct LocalSupResult {
  DenseGrid values;
  std::vector<std::int64_t> used;     // lambda_sq values that contributed
  std::size_t skipped_empty = 0;      // admissible-range lambda_sq with no copies
  std::vector<std::int64_t> skipped_sample;  // first few of those
  bool empty_range = false;
};

/// Pointwise sup of |A_{lambda S} f| over lambda_sq in [4^l, 4^{l+1}],
/// taking every `stride`-th non-empty dilation.
LocalSupResult local_sup_average(const DenseGrid& f, const SimplexConfig& simplex, int l, int stride,
                                 const CopySetProvider& provider = {}, Exec exec = Exec::parallel);

}  // namespace simplexvar
