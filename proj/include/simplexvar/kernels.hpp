#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP path and a serial
// reference selected by Exec; per-point arithmetic is identical in both, so
// results match bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>

#include "simplexvar/exec.hpp"
#include "simplexvar/grid_functions.hpp"

namespace simplexvar::kernels {

template <class Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
  const auto n = static_cast<std::ptrdiff_t>(count);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  }
}

// out(x) = sum_i weight_i * f(x - offset_i) on the periodic grid; offsets are
// `count` rows of f.dim() integers. Summation order is the row order.
void convolve_direct(const DenseGrid& f, std::span<const std::int64_t> offsets, std::span<const cplx> weights,
                     DenseGrid& out, Exec exec);

// Same with one shared weight (the uniform averaging kernels).
void convolve_uniform(const DenseGrid& f, std::span<const std::int64_t> offsets, double weight, DenseGrid& out,
                      Exec exec);

// Replaces each aligned block of `side` cells along `axis` by its mean.
void block_average_axis(DenseGrid& g, int axis, std::int64_t side, Exec exec);

// Averages `base` samples spaced `sub` apart inside each aligned block of side
// sub * base along `axis`. On data constant over sub-blocks this is the block mean.
void block_merge_axis(DenseGrid& g, int axis, std::int64_t sub, std::int64_t base, Exec exec);

}  // namespace simplexvar::kernels
