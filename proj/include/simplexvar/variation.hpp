#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <limits>
#include <span>
#include <vector>

#include "simplexvar/averaging.hpp"
#include "simplexvar/exec.hpp"
#include "simplexvar/grid_functions.hpp"
#include "simplexvar/lattice_geometry.hpp"

namespace simplexvar {

inline constexpr double kInfiniteR = std::numeric_limits<double>::infinity();

/// Values of a family at one point, scales strictly increasing.
struct SampleSequence {
  std::vector<double> values;
  std::vector<double> scales;

  // Throws UsageError unless scales are strictly increasing, sizes agree and values are finite.
  void validate() const;
};

/// r-variation: the supremum over increasing index subsequences of the l^r
/// norm of consecutive differences, computed exactly by an O(L^2) dynamic
/// program. r = infinity gives max_{i<j} |a_j - a_i|. UsageError for r <= 0.
double v_r(std::span<const double> a, double r);
double v_r(std::span<const cplx> a, double r);
inline double v_r(const SampleSequence& seq, double r) { return v_r(std::span<const double>(seq.values), r); }

/// Longest chain u_1 < v_1 <= u_2 < v_2 <= ... with |a_{v_i} - a_{u_i}| > lam.
/// Earliest-finish greedy; the real version tracks a running min/max, the
/// complex one scans every candidate u.
std::size_t jump_count(std::span<const double> a, double lam);
std::size_t jump_count(std::span<const cplx> a, double lam);
inline std::size_t jump_count(const SampleSequence& seq, double lam) {
  return jump_count(std::span<const double>(seq.values), lam);
}

/// A_{lambda S} f for every usable dilation in a list (lambda, not lambda^2).
struct AverageFamily {
  std::vector<std::int64_t> dilations;  // used, increasing
  std::vector<std::int64_t> skipped;    // no copies at this dilation
  std::vector<DenseGrid> averages;
  bool real_valued = true;

  std::size_t length() const { return averages.size(); }
  std::size_t grid_size() const { return averages.empty() ? 0 : averages.front().size(); }
};

// Skipped dilations are reported through `log` when given.
AverageFamily average_family(const DenseGrid& f, const SimplexConfig& simplex, std::span<const std::int64_t> dilations,
                             const CopySetProvider& provider = {}, Exec exec = Exec::parallel,
                             const std::function<void(const std::string&)>& log = {});

DenseGrid variation_field(const AverageFamily& family, double r, Exec exec = Exec::parallel);
DenseGrid variation_field(const DenseGrid& f, const SimplexConfig& simplex, std::span<const std::int64_t> dilations,
                          double r, Exec exec = Exec::parallel);

struct JumpField {
  DenseGrid counts;  // J_lam(x), integer valued
  DenseGrid scaled;  // lam * sqrt(J_lam(x))
};

JumpField jump_field(const AverageFamily& family, double lam, Exec exec = Exec::parallel);
JumpField jump_field(const DenseGrid& f, const SimplexConfig& simplex, std::span<const std::int64_t> dilations,
                     double lam, Exec exec = Exec::parallel);

DenseGrid lacunary_maximal_field(const AverageFamily& family, Exec exec = Exec::parallel);
DenseGrid lacunary_maximal_field(const DenseGrid& f, const SimplexConfig& simplex,
                                 std::span<const std::int64_t> dilations, Exec exec = Exec::parallel);

// (sum_l |A_l f(x)|^2)^{1/2}.
DenseGrid square_function_field(const AverageFamily& family, Exec exec = Exec::parallel);

// Per-point jump counts of an arbitrary family of grids (used for E_l f too).
JumpField jump_field_of(std::span<const DenseGrid> family, double lam, Exec exec = Exec::parallel);

}  // namespace simplexvar
