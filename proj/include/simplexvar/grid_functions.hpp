#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "simplexvar/exec.hpp"
#include "simplexvar/lattice_geometry.hpp"

namespace simplexvar {

using cplx = std::complex<double>;

/// A function on the periodic grid (Z/N)^dim, row-major, last axis fastest.
class DenseGrid {
 public:
  DenseGrid() = default;
  DenseGrid(int period, int dim);

  int period() const { return period_; }
  int dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }

  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }

  // Index of x reduced modulo N on every axis (negative coordinates allowed).
  std::size_t index_of(std::span<const std::int64_t> x) const;
  // Coordinates in [0, N) of a flat index.
  void coords_of(std::size_t index, std::span<std::int64_t> out) const;

  bool same_shape(const DenseGrid& other) const { return period_ == other.period_ && dim_ == other.dim_; }

 private:
  int period_ = 0;
  int dim_ = 0;
  std::vector<cplx> values_;
};

/// Finitely supported function on Z^dim. Zero values are never stored.
class SparseFunction {
 public:
  explicit SparseFunction(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::map<IntVec, cplx>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  void set(const IntVec& x, cplx value);
  void add(const IntVec& x, cplx value);
  cplx at(const IntVec& x) const;

  // Largest per-axis extent (max - min) of the support; 0 when empty.
  std::int64_t diameter() const;

 private:
  int dim_;
  std::map<IntVec, cplx> entries_;
};

/// Fourier coefficients at the grid frequencies xi = a / N, a in {0..N-1}^dim.
struct Spectrum {
  int period = 0;
  int dim = 0;
  std::vector<cplx> coefficients;
};

enum class DftBackend { fast, naive };

// F(a) = sum_x f(x) e(-x.a/N), e(t) = exp(2 pi i t).
Spectrum dft_forward(const DenseGrid& f, DftBackend backend = DftBackend::fast);
// Inverse with 1/N^dim normalization.
DenseGrid dft_inverse(const Spectrum& spectrum, DftBackend backend = DftBackend::fast);

struct ConvolutionResult {
  DenseGrid values;
  bool wraparound = false;  // kernel diameter >= N
};

// (f * w)(x) = sum_y w(y) f(x - y), circular indexing on the grid.
ConvolutionResult convolve(const DenseGrid& f, const SparseFunction& kernel, Exec exec = Exec::parallel);
// Exact non-periodic convolution of finitely supported functions.
SparseFunction convolve(const SparseFunction& f, const SparseFunction& kernel);

// l^p norm, p in [1, inf]; pass INFINITY for the sup norm.
double lp_norm(const DenseGrid& f, double p);
double lp_norm(const SparseFunction& f, double p);

// g(x) = f(x - offset), circular.
DenseGrid shift(const DenseGrid& f, std::span<const std::int64_t> offset);

// Dense copy of a sparse function, wrapping coordinates modulo N.
DenseGrid to_dense(const SparseFunction& f, int period);

struct GeneratorSpec {
  enum class Kind { gaussian_iid, delta, box_indicator, fourier_band };

  Kind kind = Kind::gaussian_iid;
  int period = 8;
  int dim = 1;
  int box_side = 1;                // box_indicator: indicator of [0, side)^dim
  std::vector<std::size_t> band;   // fourier_band: flat frequency indices

  // "gaussian-iid", "delta", "box-indicator", "fourier-band"; UsageError otherwise.
  static Kind parse_kind(const std::string& name);
};

/// Deterministic test functions. gaussian-iid is real N(0,1) per point;
/// fourier-band has complex Gaussian coefficients exactly on `band` and
/// zero spectrum elsewhere.
DenseGrid random_test_function(std::uint64_t seed, const GeneratorSpec& spec);

}  // namespace simplexvar
