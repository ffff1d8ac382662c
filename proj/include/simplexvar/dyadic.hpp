#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "simplexvar/exec.hpp"
#include "simplexvar/grid_functions.hpp"
#include "simplexvar/lattice_geometry.hpp"
#include "simplexvar/variation.hpp"

namespace simplexvar {

/// Nested cubes of side B^l: Q_t^l = B^l (t + [0,1)^dim) intersected with Z^dim.
/// B is an integer so the levels nest exactly.
struct DyadicScheme {
  std::int64_t base = 2;
  int dim = 1;
  int max_level = 0;  // largest l with B^l <= 2^40

  DyadicScheme(std::int64_t base, int dim);

  // B = ceil(2|s|), computed exactly from |s|^2.
  static DyadicScheme for_simplex(const SimplexConfig& simplex);

  std::int64_t side(int l) const;
  // t_i = floor(x_i / B^l).
  IntVec cube_index(std::span<const std::int64_t> x, int l) const;
  // Largest l <= max_level with B^l dividing N.
  int top_level(int period) const;
};

// Cube average; dense grids need B^l | N (UsageError otherwise).
DenseGrid conditional_expectation(const DenseGrid& f, const DyadicScheme& scheme, int l, Exec exec = Exec::parallel);
// Exact on the full cubes meeting supp f.
SparseFunction conditional_expectation(const SparseFunction& f, const DyadicScheme& scheme, int l);

// D_m f = E_m f - E_{m-1} f, m >= 1.
DenseGrid martingale_difference(const DenseGrid& f, const DyadicScheme& scheme, int m, Exec exec = Exec::parallel);
SparseFunction martingale_difference(const SparseFunction& f, const DyadicScheme& scheme, int m);

// Jump counts of l -> E_l f(x) over the given (increasing) levels.
JumpField martingale_jump_field(const DenseGrid& f, const DyadicScheme& scheme, std::span<const int> levels, double lam,
                                Exec exec = Exec::parallel);

}  // namespace simplexvar
