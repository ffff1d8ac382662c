#include "simplexvar/kernels.hpp"

#include <vector>

#include "simplexvar/errors.hpp"

namespace simplexvar::kernels {

namespace {

struct Strides {
  std::vector<std::size_t> stride;
  explicit Strides(const DenseGrid& g) : stride(static_cast<std::size_t>(g.dim())) {
    std::size_t s = 1;
    for (int a = g.dim() - 1; a >= 0; --a) {
      stride[static_cast<std::size_t>(a)] = s;
      s *= static_cast<std::size_t>(g.period());
    }
  }
};

// Offsets reduced to [0, N) per axis.
std::vector<std::int64_t> reduce_offsets(std::span<const std::int64_t> offsets, std::int64_t period) {
  std::vector<std::int64_t> out(offsets.begin(), offsets.end());
  for (auto& v : out) v = ((v % period) + period) % period;
  return out;
}

template <class WeightAt>
void convolve_impl(const DenseGrid& f, std::span<const std::int64_t> offsets, WeightAt weight_at, DenseGrid& out,
                   Exec exec) {
  const int dim = f.dim();
  const std::int64_t period = f.period();
  if (offsets.size() % static_cast<std::size_t>(dim) != 0) throw UsageError("kernel offsets not a multiple of dim");
  const std::size_t count = offsets.size() / static_cast<std::size_t>(dim);
  const auto reduced = reduce_offsets(offsets, period);
  const Strides strides(f);
  if (!out.same_shape(f)) out = DenseGrid(f.period(), f.dim());
  const auto in = f.values();
  auto dst = out.values();
  for_each_index(f.size(), exec, [&](std::size_t idx) {
    std::int64_t x[16];
    std::size_t rest = idx;
    for (int a = 0; a < dim; ++a) {
      x[a] = static_cast<std::int64_t>(rest / strides.stride[static_cast<std::size_t>(a)]);
      rest %= strides.stride[static_cast<std::size_t>(a)];
    }
    cplx acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const std::int64_t* y = reduced.data() + i * static_cast<std::size_t>(dim);
      std::size_t src = 0;
      for (int a = 0; a < dim; ++a) {
        std::int64_t c = x[a] - y[a];
        if (c < 0) c += period;
        src += static_cast<std::size_t>(c) * strides.stride[static_cast<std::size_t>(a)];
      }
      acc += weight_at(i) * in[src];
    }
    dst[idx] = acc;
  });
}

}  // namespace

void convolve_direct(const DenseGrid& f, std::span<const std::int64_t> offsets, std::span<const cplx> weights,
                     DenseGrid& out, Exec exec) {
  if (f.dim() > 16) throw UsageError("grid dimension above 16 is not supported");
  if (weights.size() * static_cast<std::size_t>(f.dim()) != offsets.size()) {
    throw UsageError("kernel weights and offsets disagree");
  }
  convolve_impl(f, offsets, [&](std::size_t i) { return weights[i]; }, out, exec);
}

void convolve_uniform(const DenseGrid& f, std::span<const std::int64_t> offsets, double weight, DenseGrid& out,
                      Exec exec) {
  if (f.dim() > 16) throw UsageError("grid dimension above 16 is not supported");
  // Sum first, scale once, so the result does not depend on the weight's rounding per term.
  DenseGrid sums;
  convolve_impl(f, offsets, [](std::size_t) { return 1.0; }, sums, exec);
  if (!out.same_shape(f)) out = DenseGrid(f.period(), f.dim());
  auto dst = out.values();
  auto src = sums.values();
  for_each_index(f.size(), exec, [&](std::size_t i) { dst[i] = src[i] * weight; });
}

void block_average_axis(DenseGrid& g, int axis, std::int64_t side, Exec exec) {
  const std::int64_t period = g.period();
  if (side < 1 || period % side != 0) throw UsageError("block side must divide the period");
  if (side == 1) return;
  const Strides strides(g);
  const std::size_t stride = strides.stride[static_cast<std::size_t>(axis)];
  const std::size_t outer = g.size() / (stride * static_cast<std::size_t>(period));
  const std::size_t blocks = static_cast<std::size_t>(period / side);
  auto v = g.values();
  // One task per (outer, block, inner) line segment.
  const std::size_t tasks = outer * blocks * stride;
  for_each_index(tasks, exec, [&](std::size_t t) {
    const std::size_t inner = t % stride;
    const std::size_t block = (t / stride) % blocks;
    const std::size_t o = t / (stride * blocks);
    const std::size_t base = o * stride * static_cast<std::size_t>(period) + block * static_cast<std::size_t>(side) * stride + inner;
    cplx acc = 0.0;
    for (std::int64_t s = 0; s < side; ++s) acc += v[base + static_cast<std::size_t>(s) * stride];
    acc /= static_cast<double>(side);
    for (std::int64_t s = 0; s < side; ++s) v[base + static_cast<std::size_t>(s) * stride] = acc;
  });
}

void block_merge_axis(DenseGrid& g, int axis, std::int64_t sub, std::int64_t base, Exec exec) {
  const std::int64_t period = g.period();
  const std::int64_t side = sub * base;
  if (sub < 1 || base < 1 || period % side != 0) throw UsageError("block side must divide the period");
  if (base == 1) return;
  const Strides strides(g);
  const std::size_t stride = strides.stride[static_cast<std::size_t>(axis)];
  const std::size_t outer = g.size() / (stride * static_cast<std::size_t>(period));
  const std::size_t blocks = static_cast<std::size_t>(period / side);
  const auto usub = static_cast<std::size_t>(sub);
  auto v = g.values();
  const std::size_t tasks = outer * blocks * usub * stride;
  for_each_index(tasks, exec, [&](std::size_t t) {
    const std::size_t inner = t % stride;
    const std::size_t o = (t / stride) % usub;
    const std::size_t block = (t / (stride * usub)) % blocks;
    const std::size_t line = t / (stride * usub * blocks);
    const std::size_t first = line * stride * static_cast<std::size_t>(period) +
                              (block * static_cast<std::size_t>(side) + o) * stride + inner;
    const std::size_t step = usub * stride;
    const cplx head = v[first];
    bool flat = true;
    cplx acc = 0.0;
    for (std::int64_t c = 0; c < base; ++c) {
      const cplx x = v[first + static_cast<std::size_t>(c) * step];
      flat = flat && (x == head);
      acc += x;
    }
    // Already constant: keep the value bit for bit so nested averages commute exactly.
    const cplx mean = flat ? head : acc / static_cast<double>(base);
    for (std::int64_t c = 0; c < base; ++c) v[first + static_cast<std::size_t>(c) * step] = mean;
  });
}

}  // namespace simplexvar::kernels
