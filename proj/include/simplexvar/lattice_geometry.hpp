#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "simplexvar/exec.hpp"

namespace simplexvar {

using IntVec = std::vector<std::int64_t>;
using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// A non-degenerate k-simplex {0, s_1, ..., s_k} in Z^n.
///
/// Construction validates rational linear independence of the vertices and
/// caches the squared-distance matrix d_ij = |s_i - s_j|^2 (with s_0 = 0)
/// and |s|^2 = sum_i |s_i|^2 for the concatenated vector s in Z^{kn}.
class SimplexConfig {
 public:
  static SimplexConfig from_vertices(int n, std::vector<IntVec> vertices);

  // {0, e_1} in Z^n; its copies at dilation lambda are the sphere |y|^2 = lambda^2.
  static SimplexConfig unit_edge(int n);

  int n() const { return n_; }
  int k() const { return static_cast<int>(vertices_.size()); }
  int dim() const { return n_ * k(); }
  const std::vector<IntVec>& vertices() const { return vertices_; }
  const IntMatrix& dist_sq() const { return dist_sq_; }
  std::int64_t dist_sq(int i, int j) const { return dist_sq_[i][j]; }
  std::int64_t norm_sq() const { return norm_sq_; }
  double norm() const;

  // n >= 2k + 3, where the copy counts are known to scale like lambda^{nk-k(k+1)}.
  bool in_counting_regime() const { return n_ >= 2 * k() + 3; }
  int scaling_exponent() const { return n_ * k() - k() * (k() + 1); }

 private:
  SimplexConfig() = default;

  int n_ = 0;
  std::vector<IntVec> vertices_;
  IntMatrix dist_sq_;
  std::int64_t norm_sq_ = 0;
};

enum class CopyKind { sphere, simplex };

std::string to_string(CopyKind kind);
CopyKind parse_copy_kind(const std::string& s);

/// An exactly enumerated set of lattice points: sphere points (k = 1) or
/// concatenated simplex copies (m_1, ..., m_k) in Z^{kn}. Rows are stored
/// flat in lexicographic order of the concatenated coordinates.
struct CopySet {
  CopyKind kind = CopyKind::sphere;
  int n = 0;
  int k = 1;
  std::int64_t lambda_sq = 0;
  IntMatrix dist_sq;
  std::vector<std::int64_t> coords;

  int dim() const { return n * k; }
  std::size_t count() const { return dim() == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim()); }
  bool empty() const { return coords.empty(); }
  std::span<const std::int64_t> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim()), static_cast<std::size_t>(dim())};
  }
};

/// r_n(m) = #{y in Z^n : |y|^2 = m}, by coordinate recursion over square
/// residuals (tabulated, no points materialized). Throws CapacityError if
/// the count does not fit in 64 bits.
std::uint64_t count_representations(int n, std::int64_t m);

/// r_n(m) for every m in [0, m_max].
std::vector<std::uint64_t> representation_counts(int n, std::int64_t m_max);

/// All y in Z^n with |y|^2 = m, lexicographic order.
CopySet enumerate_sphere(int n, std::int64_t m, Exec exec = Exec::parallel);

/// All (m_1..m_k) in Z^{nk} with |m_i - m_j|^2 = lambda_sq * d_ij, m_0 = 0.
/// An empty result is valid.
CopySet enumerate_simplex_copies(const SimplexConfig& simplex, std::int64_t lambda_sq,
                                 Exec exec = Exec::parallel);

/// True iff every pairwise squared-distance constraint holds exactly.
/// Throws UsageError if candidate.size() != nk.
bool verify_isometry(const SimplexConfig& simplex, std::int64_t lambda_sq,
                     std::span<const std::int64_t> candidate);

// Source of copy sets; the experiment harness plugs its disk cache in here.
using CopySetProvider = std::function<CopySet(const SimplexConfig&, std::int64_t lambda_sq)>;

struct ScalingRow {
  std::int64_t lambda = 0;
  std::uint64_t count = 0;
  double ratio = 0.0;  // count / lambda^{nk-k(k+1)}
  bool regime_violated = false;
};

/// Exact copy counts at each dilation lambda (lambda_sq = lambda^2) with the
/// normalized ratio. Rows are flagged when n < 2k + 3.
std::vector<ScalingRow> cardinality_scaling_report(const SimplexConfig& simplex,
                                                   std::span<const std::int64_t> lambdas,
                                                   const CopySetProvider& provider = {});

// floor(sqrt(v)) for v >= 0, exact.
std::int64_t isqrt(std::int64_t v);

}  // namespace simplexvar
