#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "simplexvar/grid_functions.hpp"
#include "simplexvar/lattice_geometry.hpp"

namespace simplexvar {

/// t_j = lcm{1, 2, ..., 2^j}. Defined for j <= 5; CapacityError beyond.
std::uint64_t lcm_t(int j);

// Smooth step on (0, 1): sigma(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)}).
double transition_sigma(double u);

/// One-dimensional bump: 1 on |t| <= 1/2, 0 on |t| >= 1, sigma(2(1 - |t|)) between.
double psi_hat1(double t);

/// The fixed Fourier-side profile, tensored over `dim` coordinates.
struct PsiSpec {
  int dim = 1;
  double operator()(std::span<const double> xi) const;
};

double psi_hat(std::span<const double> xi);

/// Torus multiplier of the sampled, dilated bump psi_{step,width} at one
/// coordinate, by Poisson summation: sum_x psi_hat1((width/step)(x + step*xi)).
double multiplier_psi_axis(std::uint64_t step, double width, double xi);

/// The full tensor multiplier: the product of the per-axis sums.
double multiplier_psi(std::uint64_t step, double width, std::span<const double> xi);

/// Parameters of Psi^s_{l,j} = psi_{t_j, (2|s|)^{l-j}}.
struct MultiplierSpec {
  int l = 0;
  int j = 0;
  std::uint64_t step = 1;
  double width = 1.0;
  double norm_s = 1.0;

  static MultiplierSpec make(const SimplexConfig& simplex, int l, int j);

  // width <= step: the sampled bump is used outside the range where it is
  // defined by the construction (J > l); the sum is still finite.
  bool width_below_step() const { return width <= static_cast<double>(step); }
  // Neighbouring lattice translates overlap: below this the plateau value 1 is not guaranteed.
  bool arcs_overlap() const { return width < 1.5 * static_cast<double>(step); }
};

double multiplier_Psi(const SimplexConfig& simplex, int l, int j, std::span<const double> xi);

// Band increment Psi_{l,j+1} - Psi_{l,j}; summing over j telescopes.
double multiplier_DeltaPsi(const SimplexConfig& simplex, int l, int j, std::span<const double> xi);

// Scale increment Psi_{l+1,j} - Psi_{l,j}; the square sum over l is the
// uniformly bounded quantity.
double multiplier_scale_increment(const SimplexConfig& simplex, int l, int j, std::span<const double> xi);

/// Omega^s_{l,j}: the (2|s|)^{j-l} neighbourhood (sup norm, on the torus) of
/// (t_j^{-1} Z)^{kn}.
struct FrequencyArcs {
  int l = 0;
  int j = 0;
  std::int64_t norm_sq = 1;
  std::uint64_t step = 1;

  static FrequencyArcs make(const SimplexConfig& simplex, int l, int j);

  double half_width() const;
  bool covers_torus() const { return half_width() >= 0.5; }

  // Floating membership for arbitrary xi.
  bool contains(std::span<const double> xi) const;

  // Exact membership of the grid frequency a/N, scaled by shrink = 2^{-halvings}
  // and by an extra factor (2|s|)^{extra_exponent} on the half-width.
  bool contains_grid(std::span<const std::int64_t> a, std::int64_t period, int halvings = 0,
                     int extra_exponent = 0) const;
};

inline bool arc_membership(const FrequencyArcs& arcs, std::span<const double> xi) { return arcs.contains(xi); }

/// Per-axis multiplier values at a/N, a = 0..N-1.
std::vector<double> axis_multiplier_table(std::uint64_t step, double width, int period);

/// Psi^s_{l,j} at every grid frequency (length N^dim, row-major).
std::vector<double> grid_multiplier_Psi(const SimplexConfig& simplex, int l, int j, int period);

/// J_l = floor(log2 l), l >= 1.
int band_count(int l);

struct Decomposition {
  DenseGrid f1;
  DenseGrid f2;
  DenseGrid f3;
  int bands = 0;        // J_l
  int top_index = 0;    // index used in f3 = f - f * Psi_{l, top_index}
};

/// f = f1 + f2 + f3 with multipliers Psi_{l,0}, sum_{j=0}^{J_l-3} DeltaPsi_{l,j},
/// and 1 - Psi_{l,max(J_l-2,0)}.
Decomposition decompose(const DenseGrid& f, const SimplexConfig& simplex, int l);

/// The three multipliers of decompose() at every grid frequency.
struct DecompositionMultipliers {
  std::vector<double> low;
  std::vector<double> middle;
  std::vector<double> high;
};
DecompositionMultipliers decomposition_multipliers(const SimplexConfig& simplex, int l, int period, int dim);

/// Partial sums of sum_{l=2^j}^{L} |Psi_{l+1,j}(xi) - Psi_{l,j}(xi)|^2 for
/// L = 2^j .. l_max.
std::vector<double> square_sum_delta(const SimplexConfig& simplex, int j, std::span<const double> xi, int l_max);

}  // namespace simplexvar
