// Serial reference vs OpenMP for the hot kernels. Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include <vector>

#include "simplexvar/averaging.hpp"
#include "simplexvar/dyadic.hpp"
#include "simplexvar/kernels.hpp"
#include "simplexvar/lattice_geometry.hpp"
#include "simplexvar/variation.hpp"

namespace sv = simplexvar;

namespace {

sv::Exec exec_of(const benchmark::State& state) { return state.range(0) ? sv::Exec::parallel : sv::Exec::serial; }

sv::DenseGrid gaussian(int period, int dim) {
  sv::GeneratorSpec spec;
  spec.period = period;
  spec.dim = dim;
  return sv::random_test_function(7, spec);
}

void BM_ConvolveUniform(benchmark::State& state) {
  const auto f = gaussian(16, 5);
  const auto copies = sv::enumerate_sphere(5, 4);  // 90 points
  sv::DenseGrid out(16, 5);
  for (auto _ : state) {
    sv::kernels::convolve_uniform(f, copies.coords, 1.0 / static_cast<double>(copies.count()), out, exec_of(state));
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size() * copies.count()));
}

void BM_VariationField(benchmark::State& state) {
  const auto f = gaussian(16, 5);
  const auto simplex = sv::SimplexConfig::unit_edge(5);
  const std::vector<std::int64_t> scales = {1, 2, 4};
  const auto family = sv::average_family(f, simplex, scales);
  for (auto _ : state) {
    auto v = sv::variation_field(family, 3.0, exec_of(state));
    benchmark::DoNotOptimize(v.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}

void BM_ConditionalExpectation(benchmark::State& state) {
  const auto f = gaussian(16, 5);
  const sv::DyadicScheme scheme(2, 5);
  for (auto _ : state) {
    auto e = sv::conditional_expectation(f, scheme, 3, exec_of(state));
    benchmark::DoNotOptimize(e.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}

}  // namespace

BENCHMARK(BM_ConvolveUniform)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VariationField)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConditionalExpectation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
