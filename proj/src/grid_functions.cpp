#include "simplexvar/grid_functions.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <new>
#include <numbers>

#include "simplexvar/errors.hpp"
#include "simplexvar/kernels.hpp"
#include "simplexvar/rng.hpp"

namespace simplexvar {

namespace {

std::size_t grid_size(int period, int dim) {
  if (period < 1 || dim < 1) throw UsageError("grid needs period >= 1 and dim >= 1");
  std::size_t size = 1;
  for (int a = 0; a < dim; ++a) {
    if (__builtin_mul_overflow(size, static_cast<std::size_t>(period), &size)) {
      throw CapacityError("grid size N^dim exceeds the address space");
    }
  }
  return size;
}

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void fftw_transform(std::vector<cplx>& data, int period, int dim, int sign) {
  std::vector<int> shape(static_cast<std::size_t>(dim), period);
  // FFTW picks codelets by alignment; a dedicated fftw_malloc buffer keeps
  // the algorithm, and so every rounding, the same from run to run.
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * data.size()));
  if (!buf) throw std::bad_alloc();
  std::copy(data.begin(), data.end(), reinterpret_cast<cplx*>(buf));
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(dim, shape.data(), buf, buf, sign, FFTW_ESTIMATE);
  }
  if (!plan) {
    fftw_free(buf);
    throw std::runtime_error("fftw: planning failed");
  }
  fftw_execute(plan);
  std::copy(reinterpret_cast<cplx*>(buf), reinterpret_cast<cplx*>(buf) + data.size(), data.begin());
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
  fftw_free(buf);
}

// Separable O(N^{dim+1}) transform, valid for every N.
void naive_transform(std::vector<cplx>& data, int period, int dim, int sign) {
  const auto n = static_cast<std::size_t>(period);
  std::vector<cplx> twiddle(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(period);
    twiddle[t] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<cplx> line(n), out(n);
  std::size_t stride = 1;
  for (int axis = dim - 1; axis >= 0; --axis) {
    const std::size_t outer = data.size() / (stride * n);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = o * stride * n + inner;
        for (std::size_t i = 0; i < n; ++i) line[i] = data[base + i * stride];
        for (std::size_t a = 0; a < n; ++a) {
          cplx acc = 0.0;
          for (std::size_t x = 0; x < n; ++x) acc += line[x] * twiddle[(a * x) % n];
          out[a] = acc;
        }
        for (std::size_t i = 0; i < n; ++i) data[base + i * stride] = out[i];
      }
    }
    stride *= n;
  }
}

}  // namespace

DenseGrid::DenseGrid(int period, int dim) : period_(period), dim_(dim), values_(grid_size(period, dim), cplx{}) {}

std::size_t DenseGrid::index_of(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != dim_) throw UsageError("point dimension does not match grid");
  std::size_t idx = 0;
  for (const std::int64_t v : x) {
    const std::int64_t r = ((v % period_) + period_) % period_;
    idx = idx * static_cast<std::size_t>(period_) + static_cast<std::size_t>(r);
  }
  return idx;
}

void DenseGrid::coords_of(std::size_t index, std::span<std::int64_t> out) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(index % static_cast<std::size_t>(period_));
    index /= static_cast<std::size_t>(period_);
  }
}

void SparseFunction::set(const IntVec& x, cplx value) {
  if (static_cast<int>(x.size()) != dim_) throw UsageError("point dimension does not match sparse function");
  if (value == cplx{}) {
    entries_.erase(x);
  } else {
    entries_[x] = value;
  }
}

void SparseFunction::add(const IntVec& x, cplx value) { set(x, at(x) + value); }

cplx SparseFunction::at(const IntVec& x) const {
  auto it = entries_.find(x);
  return it == entries_.end() ? cplx{} : it->second;
}

std::int64_t SparseFunction::diameter() const {
  if (entries_.empty()) return 0;
  std::int64_t best = 0;
  for (int a = 0; a < dim_; ++a) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& [x, v] : entries_) {
      lo = std::min(lo, x[static_cast<std::size_t>(a)]);
      hi = std::max(hi, x[static_cast<std::size_t>(a)]);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

Spectrum dft_forward(const DenseGrid& f, DftBackend backend) {
  Spectrum out{f.period(), f.dim(), std::vector<cplx>(f.values().begin(), f.values().end())};
  if (backend == DftBackend::fast) {
    fftw_transform(out.coefficients, f.period(), f.dim(), FFTW_FORWARD);
  } else {
    naive_transform(out.coefficients, f.period(), f.dim(), -1);
  }
  return out;
}

DenseGrid dft_inverse(const Spectrum& spectrum, DftBackend backend) {
  DenseGrid out(spectrum.period, spectrum.dim);
  if (spectrum.coefficients.size() != out.size()) throw UsageError("spectrum size does not match N^dim");
  std::vector<cplx> data = spectrum.coefficients;
  if (backend == DftBackend::fast) {
    fftw_transform(data, spectrum.period, spectrum.dim, FFTW_BACKWARD);
  } else {
    naive_transform(data, spectrum.period, spectrum.dim, +1);
  }
  const double scale = 1.0 / static_cast<double>(out.size());
  auto v = out.values();
  for (std::size_t i = 0; i < data.size(); ++i) v[i] = data[i] * scale;
  return out;
}

ConvolutionResult convolve(const DenseGrid& f, const SparseFunction& kernel, Exec exec) {
  if (kernel.dim() != f.dim()) throw UsageError("kernel dimension does not match grid");
  std::vector<std::int64_t> offsets;
  std::vector<cplx> weights;
  offsets.reserve(kernel.support_size() * static_cast<std::size_t>(f.dim()));
  for (const auto& [y, w] : kernel.entries()) {
    offsets.insert(offsets.end(), y.begin(), y.end());
    weights.push_back(w);
  }
  ConvolutionResult out;
  out.wraparound = kernel.diameter() >= f.period();
  kernels::convolve_direct(f, offsets, weights, out.values, exec);
  return out;
}

SparseFunction convolve(const SparseFunction& f, const SparseFunction& kernel) {
  if (kernel.dim() != f.dim()) throw UsageError("kernel dimension does not match function");
  SparseFunction out(f.dim());
  IntVec x(static_cast<std::size_t>(f.dim()));
  for (const auto& [u, fu] : f.entries()) {
    for (const auto& [y, w] : kernel.entries()) {
      for (std::size_t a = 0; a < x.size(); ++a) x[a] = u[a] + y[a];
      out.add(x, w * fu);
    }
  }
  return out;
}

namespace {

template <class Range>
double lp_of_values(const Range& values, double p) {
  if (!(p >= 1.0)) throw UsageError("lp_norm needs p in [1, inf]");
  if (std::isinf(p)) {
    double best = 0.0;
    for (const cplx& v : values) best = std::max(best, std::abs(v));
    return best;
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (const cplx& v : values) acc += std::norm(v);
    return std::sqrt(acc);
  }
  for (const cplx& v : values) acc += std::pow(std::abs(v), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace

double lp_norm(const DenseGrid& f, double p) { return lp_of_values(f.values(), p); }

double lp_norm(const SparseFunction& f, double p) {
  std::vector<cplx> values;
  values.reserve(f.support_size());
  for (const auto& [x, v] : f.entries()) values.push_back(v);
  return lp_of_values(values, p);
}

DenseGrid shift(const DenseGrid& f, std::span<const std::int64_t> offset) {
  if (static_cast<int>(offset.size()) != f.dim()) throw UsageError("shift dimension does not match grid");
  DenseGrid out(f.period(), f.dim());
  std::vector<std::int64_t> x(static_cast<std::size_t>(f.dim()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords_of(i, x);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += offset[a];
    out[out.index_of(x)] = f[i];
  }
  return out;
}

DenseGrid to_dense(const SparseFunction& f, int period) {
  DenseGrid out(period, f.dim());
  for (const auto& [x, v] : f.entries()) out[out.index_of(x)] += v;
  return out;
}

GeneratorSpec::Kind GeneratorSpec::parse_kind(const std::string& name) {
  if (name == "gaussian-iid") return Kind::gaussian_iid;
  if (name == "delta") return Kind::delta;
  if (name == "box-indicator") return Kind::box_indicator;
  if (name == "fourier-band") return Kind::fourier_band;
  throw UsageError("unknown generator '" + name + "'");
}

DenseGrid random_test_function(std::uint64_t seed, const GeneratorSpec& spec) {
  DenseGrid out(spec.period, spec.dim);
  PortableRng rng(seed);
  switch (spec.kind) {
    case GeneratorSpec::Kind::gaussian_iid:
      for (auto& v : out.values()) v = rng.normal();
      break;
    case GeneratorSpec::Kind::delta:
      out[0] = 1.0;
      break;
    case GeneratorSpec::Kind::box_indicator: {
      if (spec.box_side < 1 || spec.box_side > spec.period) throw UsageError("box side must lie in [1, N]");
      std::vector<std::int64_t> x(static_cast<std::size_t>(spec.dim));
      for (std::size_t i = 0; i < out.size(); ++i) {
        out.coords_of(i, x);
        const bool inside = std::all_of(x.begin(), x.end(), [&](std::int64_t c) { return c < spec.box_side; });
        out[i] = inside ? 1.0 : 0.0;
      }
      break;
    }
    case GeneratorSpec::Kind::fourier_band: {
      Spectrum s{spec.period, spec.dim, std::vector<cplx>(out.size())};
      for (const std::size_t a : spec.band) {
        if (a >= s.coefficients.size()) throw UsageError("band index outside the frequency grid");
        const double re = rng.normal();
        const double im = rng.normal();
        s.coefficients[a] = {re, im};
      }
      out = dft_inverse(s);
      break;
    }
  }
  return out;
}

}  // namespace simplexvar
