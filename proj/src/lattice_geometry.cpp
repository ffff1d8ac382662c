#include "simplexvar/lattice_geometry.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <utility>

#include "simplexvar/errors.hpp"

namespace simplexvar {

namespace {

using i128 = __int128;

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw CapacityError(std::string("overflow in ") + what);
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw CapacityError(std::string("overflow in ") + what);
  return out;
}

// Rank of an integer matrix over Q via fraction-free elimination with
// per-row gcd reduction.
int rational_rank(std::vector<std::vector<i128>> rows, int cols) {
  int rank = 0;
  const int nrows = static_cast<int>(rows.size());
  for (int c = 0; c < cols && rank < nrows; ++c) {
    int pivot = -1;
    for (int r = rank; r < nrows; ++r) {
      if (rows[r][c] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = rank + 1; r < nrows; ++r) {
      if (rows[r][c] == 0) continue;
      const i128 a = rows[rank][c];
      const i128 b = rows[r][c];
      i128 g = 0;
      for (int cc = 0; cc < cols; ++cc) {
        rows[r][cc] = rows[r][cc] * a - rows[rank][cc] * b;
        i128 v = rows[r][cc] < 0 ? -rows[r][cc] : rows[r][cc];
        while (v != 0) {
          i128 t = g % v;
          g = v;
          v = t;
        }
      }
      if (g > 1) {
        for (int cc = 0; cc < cols; ++cc) rows[r][cc] /= g;
      }
    }
    ++rank;
  }
  return rank;
}

// Backtracking over coordinates, one vertex at a time. Vertex i must satisfy
// |m_i - m_j|^2 = target[i][j] for every j < i (j = 0 is the origin).
// Sphere holding m_2, row-major for output and column-major for the scan.
struct SecondSphere {
  std::size_t rows = 0;
  bool narrow = false;  // int32 dot products cannot overflow
  std::vector<std::int64_t> coords;
  std::vector<std::int32_t> cols32;
  std::vector<std::int64_t> cols64;

  SecondSphere(int n, std::vector<std::int64_t> pts, std::int64_t norm1, std::int64_t norm2) : coords(std::move(pts)) {
    rows = coords.size() / static_cast<std::size_t>(n);
    // |m_1.m_2| <= sqrt(norm1 norm2), partial sums likewise
    narrow = static_cast<i128>(norm1) * norm2 < (static_cast<i128>(1) << 60) && norm1 < (1LL << 30) && norm2 < (1LL << 30);
    if (narrow) {
      cols32.resize(rows * n);
    } else {
      cols64.resize(rows * n);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      for (int c = 0; c < n; ++c) {
        const std::int64_t v = coords[i * n + c];
        if (narrow) {
          cols32[static_cast<std::size_t>(c) * rows + i] = static_cast<std::int32_t>(v);
        } else {
          cols64[static_cast<std::size_t>(c) * rows + i] = v;
        }
      }
    }
  }
};

class CopyEnumerator {
 public:
  CopyEnumerator(int n, IntMatrix target, const SecondSphere* second = nullptr)
      : n_(n), k_(static_cast<int>(target.size()) - 1), target_(std::move(target)), second_(second) {
    cur_.assign(static_cast<std::size_t>(n_ * k_), 0);
    rem_.assign(static_cast<std::size_t>(k_ + 1) * (k_ + 1), 0);
    tail_.assign(static_cast<std::size_t>(k_ + 1) * (n_ + 1), 0);
  }

  // Range of the very first coordinate of m_1; the parallel driver splits on it.
  std::int64_t first_radius() const { return isqrt(target_[1][0]); }

  // Materializes the pairs found by scan_second, in order.
  void flush(std::vector<std::int64_t>& out) {
    if (pending_.empty()) return;
    const std::size_t n = static_cast<std::size_t>(n_);
    std::size_t at = out.size();
    out.resize(at + pending_.size() * 2 * n);
    for (const auto& [i, j] : pending_) {
      std::copy_n(pending_firsts_.data() + i * n, n, out.data() + at);
      std::copy_n(second_->coords.data() + j * n, n, out.data() + at + n);
      at += 2 * n;
    }
    pending_.clear();
    pending_firsts_.clear();
  }

  void run_first(std::int64_t first_value, std::vector<std::int64_t>& out) {
    out_ = &out;
    begin_vertex(1);
    if (n_ == 1) {
      place_last(1, 0, first_value);
    } else {
      try_coordinate(1, 0, first_value);
    }
  }

 private:
  std::int64_t& rem(int vertex, int j) { return rem_[static_cast<std::size_t>(vertex) * (k_ + 1) + j]; }
  std::int64_t& tail(int j, int c) { return tail_[static_cast<std::size_t>(j) * (n_ + 1) + c]; }
  std::int64_t coord(int vertex, int c) const { return cur_[static_cast<std::size_t>(vertex - 1) * n_ + c]; }

  void begin_vertex(int vertex) {
    for (int j = 0; j < vertex; ++j) rem(vertex, j) = target_[vertex][j];
    // tail(j, c) = sum_{c' >= c} m_j[c']^2 for the placed vertices.
    for (int j = 1; j < vertex; ++j) {
      tail(j, n_) = 0;
      for (int c = n_ - 1; c >= 0; --c) tail(j, c) = tail(j, c + 1) + coord(j, c) * coord(j, c);
    }
    tail(0, n_) = 0;
    for (int c = n_ - 1; c >= 0; --c) tail(0, c) = 0;
  }

  // Applies value v at coordinate c of `vertex`; returns false if any
  // residual goes negative or becomes unreachable.
  bool apply(int vertex, int c, std::int64_t v) {
    std::int64_t* r = &rem(vertex, 0);
    const std::int64_t r0 = r[0] - v * v;
    if (r0 < 0) return false;
    for (int j = 1; j < vertex; ++j) {
      const std::int64_t d = v - coord(j, c);
      const std::int64_t rj = r[j] - d * d;
      if (rj < 0) return false;
      // Remaining coordinates: |u| = sqrt(r0), |u - w| = sqrt(rj), |w| = sqrt(b).
      // Feasible iff |sqrt(r0) - sqrt(b)| <= sqrt(rj) <= sqrt(r0) + sqrt(b).
      const i128 b = tail(j, c + 1);
      const i128 diff = static_cast<i128>(rj) - r0 - b;
      if (diff * diff > 4 * static_cast<i128>(r0) * b) return false;
    }
    r[0] = r0;
    for (int j = 1; j < vertex; ++j) {
      const std::int64_t d = v - coord(j, c);
      r[j] -= d * d;
    }
    cur_[static_cast<std::size_t>(vertex - 1) * n_ + c] = v;
    return true;
  }

  void undo(int vertex, int c) {
    const std::int64_t v = coord(vertex, c);
    std::int64_t* r = &rem(vertex, 0);
    r[0] += v * v;
    for (int j = 1; j < vertex; ++j) {
      const std::int64_t d = v - coord(j, c);
      r[j] += d * d;
    }
  }

  void try_coordinate(int vertex, int c, std::int64_t v) {
    if (!apply(vertex, c, v)) return;
    descend(vertex, c + 1);
    undo(vertex, c);
  }

  // Last two coordinates of a vertex after the first: |u|^2 = R0 and, for a placed
  // vertex with tail w != 0, 2 u.w = R0 + |w|^2 - Rj. Line meets circle in at most two
  // points, u = (h w +- sqrt(E) w_perp) / |w|^2 with E = |w|^2 R0 - h^2.
  // Returns false when no such w exists and the caller must scan.
  bool solve_last_two(int vertex) {
    const int c0 = n_ - 2, c1 = n_ - 1;
    int pivot = 0;
    for (int j = 1; j < vertex && !pivot; ++j) {
      if (coord(j, c0) != 0 || coord(j, c1) != 0) pivot = j;
    }
    if (!pivot) return false;
    const i128 a = coord(pivot, c0), b = coord(pivot, c1);
    const i128 r0 = rem(vertex, 0);
    const i128 w2 = a * a + b * b;
    const i128 q = r0 + w2 - rem(vertex, pivot);
    if (q % 2 != 0) return true;
    const i128 h = q / 2;
    const i128 e = w2 * r0 - h * h;
    if (e < 0) return true;
    if (e > std::numeric_limits<std::int64_t>::max()) return false;
    const auto root = static_cast<i128>(isqrt(static_cast<std::int64_t>(e)));
    if (root * root != e) return true;
    std::int64_t cand[2][2];
    int count = 0;
    for (const i128 sign : {-1, 1}) {
      const i128 xn = h * a - sign * root * b;
      const i128 yn = h * b + sign * root * a;
      if (xn % w2 != 0 || yn % w2 != 0) continue;
      cand[count][0] = static_cast<std::int64_t>(xn / w2);
      cand[count][1] = static_cast<std::int64_t>(yn / w2);
      ++count;
      if (root == 0) break;
    }
    if (count == 2 && (cand[1][0] < cand[0][0] || (cand[1][0] == cand[0][0] && cand[1][1] < cand[0][1]))) {
      std::swap(cand[0], cand[1]);
    }
    for (int i = 0; i < count; ++i) {
      if (!apply(vertex, c0, cand[i][0])) continue;
      place_last(vertex, c1, cand[i][1]);
      undo(vertex, c0);
    }
    return true;
  }

  void descend(int vertex, int c) {
    if (c == n_ - 2 && vertex >= 2 && rem(vertex, 0) <= std::numeric_limits<std::int64_t>::max() / 4 &&
        solve_last_two(vertex)) {
      return;
    }
    if (c == n_ - 1) {
      const std::int64_t r0 = rem(vertex, 0);
      const std::int64_t s = isqrt(r0);
      if (s * s != r0) return;
      if (s == 0) {
        place_last(vertex, c, 0);
      } else {
        place_last(vertex, c, -s);
        place_last(vertex, c, s);
      }
      return;
    }
    const std::int64_t radius = isqrt(rem(vertex, 0));
    std::int64_t lo = -radius, hi = radius;
    for (int j = 1; j < vertex && lo <= hi; ++j) narrow(vertex, j, c, lo, hi);
    for (std::int64_t v = lo; v <= hi; ++v) try_coordinate(vertex, c, v);
  }

  // apply()'s test for vertex j is 4T v^2 + 4Cw v + C^2 - 4 b r0 <= 0 with w = m_j[c],
  // b = tail(j, c+1), T = w^2 + b, C = rj - r0 - T. Clip [lo, hi] to its roots, one unit
  // of slack for rounding; apply() still decides exactly.
  void narrow(int vertex, int j, int c, std::int64_t& lo, std::int64_t& hi) {
    using ld = long double;
    const ld w = static_cast<ld>(coord(j, c));
    const ld b = static_cast<ld>(tail(j, c + 1));
    const ld t = w * w + b;
    if (t == 0) return;
    const ld r0 = static_cast<ld>(rem(vertex, 0));
    const ld cc = static_cast<ld>(rem(vertex, j)) - r0 - t;
    const ld disc = b * (4 * t * r0 - cc * cc);
    if (disc < -1e-6L * (1 + b * 4 * t * r0)) {
      hi = lo - 1;
      return;
    }
    const ld root = std::sqrt(std::max<ld>(disc, 0));
    const ld left = (-cc * w - root) / (2 * t);
    const ld right = (-cc * w + root) / (2 * t);
    lo = std::max(lo, static_cast<std::int64_t>(std::floor(left)) - 1);
    hi = std::min(hi, static_cast<std::int64_t>(std::ceil(right)) + 1);
  }

  void place_last(int vertex, int c, std::int64_t v) {
    if (!apply(vertex, c, v)) return;
    bool exact = rem(vertex, 0) == 0;
    for (int j = 1; j < vertex && exact; ++j) exact = rem(vertex, j) == 0;
    if (exact) {
      if (vertex == k_) {
        out_->insert(out_->end(), cur_.begin(), cur_.end());
      } else if (vertex == 1 && second_ != nullptr) {
        scan_second();
      } else {
        begin_vertex(vertex + 1);
        descend(vertex + 1, 0);
      }
    }
    undo(vertex, c);
  }

  // m_2 by a flat pass over the lex-sorted sphere of its norm. Far cheaper than
  // backtracking here: nearly every prefix of m_2 is feasible. Since |m_2|^2 is
  // fixed the test reduces to m_1.m_2 == want, done column-wise so it vectorizes.
  void scan_second() {
    const SecondSphere& sp = *second_;
    const std::int64_t want = (target_[1][0] + target_[2][0] - target_[2][1]);
    if (want % 2 != 0) return;
    if (sp.narrow) {
      scan_block<std::int32_t>(sp.cols32, sp, want / 2);
    } else {
      scan_block<std::int64_t>(sp.cols64, sp, want / 2);
    }
  }

  template <class T>
  void scan_block(const std::vector<T>& cols, const SecondSphere& sp, std::int64_t want) {
    constexpr std::size_t kBlock = 512;
    T acc[kBlock];
    std::uint32_t hit[kBlock];
    for (std::size_t base = 0; base < sp.rows; base += kBlock) {
      const std::size_t len = std::min(kBlock, sp.rows - base);
      std::fill(acc, acc + len, T{0});
      for (int c = 0; c < n_; ++c) {
        const T a = static_cast<T>(cur_[static_cast<std::size_t>(c)]);
        const T* col = cols.data() + static_cast<std::size_t>(c) * sp.rows + base;
        for (std::size_t i = 0; i < len; ++i) acc[i] += a * col[i];
      }
      std::size_t hits = 0;
      for (std::size_t i = 0; i < len; ++i) {
        hit[hits] = static_cast<std::uint32_t>(i);
        hits += acc[i] == static_cast<T>(want);
      }
      if (hits == 0) continue;
      if (k_ == 2) {
        // only indices now, flush() writes the rows into an exact-size buffer
        if (pending_firsts_.empty() || !std::equal(cur_.begin(), cur_.begin() + n_, pending_firsts_.end() - n_)) {
          pending_firsts_.insert(pending_firsts_.end(), cur_.begin(), cur_.begin() + n_);
        }
        const auto first = static_cast<std::uint32_t>(pending_firsts_.size() / static_cast<std::size_t>(n_) - 1);
        for (std::size_t h = 0; h < hits; ++h) pending_.push_back({first, static_cast<std::uint32_t>(base + hit[h])});
        continue;
      }
      for (std::size_t h = 0; h < hits; ++h) {
        const std::int64_t* p = sp.coords.data() + (base + hit[h]) * static_cast<std::size_t>(n_);
        std::copy(p, p + n_, cur_.begin() + n_);
        begin_vertex(3);
        descend(3, 0);
      }
    }
  }

  int n_;
  int k_;
  IntMatrix target_;
  const SecondSphere* second_ = nullptr;
  std::vector<std::int64_t> pending_firsts_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pending_;
  std::vector<std::int64_t> cur_;
  std::vector<std::int64_t> rem_;
  std::vector<std::int64_t> tail_;
  std::vector<std::int64_t>* out_ = nullptr;
};

std::vector<std::int64_t> run_enumeration(int n, const IntMatrix& target, Exec exec) {
  std::unique_ptr<SecondSphere> second;
  if (target.size() >= 3) {
    second = std::make_unique<SecondSphere>(n, run_enumeration(n, IntMatrix{IntVec{}, IntVec{target[2][0]}}, exec),
                                            target[1][0], target[2][0]);
  }
  const SecondSphere* second_ptr = second.get();
  CopyEnumerator probe(n, target);
  const std::int64_t radius = probe.first_radius();
  // Slices for v = -radius..radius, concatenated in order so the output is
  // identical for any thread count.
  const std::int64_t slices = 2 * radius + 1;
  if (exec == Exec::serial || omp_get_max_threads() == 1) {
    // slices already come out in order, skip the concatenation copy
    std::vector<std::int64_t> out;
    CopyEnumerator local(n, target, second_ptr);
    for (std::int64_t s = 0; s < slices; ++s) local.run_first(s - radius, out);
    local.flush(out);
    return out;
  }
  std::vector<std::vector<std::int64_t>> parts(static_cast<std::size_t>(slices));
  {
#pragma omp parallel
    {
      CopyEnumerator local(n, target, second_ptr);
#pragma omp for schedule(dynamic, 1)
      for (std::int64_t s = 0; s < slices; ++s) {
        local.run_first(s - radius, parts[static_cast<std::size_t>(s)]);
        local.flush(parts[static_cast<std::size_t>(s)]);
      }
    }
  }
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<std::int64_t> out;
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

std::int64_t isqrt(std::int64_t v) {
  if (v < 0) throw UsageError("isqrt of negative value");
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
  while (s > 0 && static_cast<i128>(s) * s > v) --s;
  while (static_cast<i128>(s + 1) * (s + 1) <= v) ++s;
  return s;
}

SimplexConfig SimplexConfig::from_vertices(int n, std::vector<IntVec> vertices) {
  if (n < 1) throw UsageError("simplex dimension n must be positive");
  const int k = static_cast<int>(vertices.size());
  if (k < 1 || k > n) throw UsageError("simplex needs 1 <= k <= n vertices");
  for (const auto& v : vertices) {
    if (static_cast<int>(v.size()) != n) throw UsageError("simplex vertex has wrong dimension");
  }
  std::vector<std::vector<i128>> rows;
  for (const auto& v : vertices) rows.emplace_back(v.begin(), v.end());
  if (rational_rank(rows, n) != k) throw UsageError("simplex vertices are linearly dependent");

  SimplexConfig out;
  out.n_ = n;
  out.vertices_ = std::move(vertices);
  out.dist_sq_.assign(static_cast<std::size_t>(k + 1), std::vector<std::int64_t>(static_cast<std::size_t>(k + 1), 0));
  auto vertex = [&](int i, int c) -> std::int64_t { return i == 0 ? 0 : out.vertices_[i - 1][c]; };
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k; ++j) {
      std::int64_t acc = 0;
      for (int c = 0; c < n; ++c) {
        const std::int64_t d = vertex(i, c) - vertex(j, c);
        acc = checked_add(acc, checked_mul(d, d, "simplex distance"), "simplex distance");
      }
      out.dist_sq_[i][j] = acc;
    }
  }
  for (int i = 1; i <= k; ++i) out.norm_sq_ = checked_add(out.norm_sq_, out.dist_sq_[0][i], "simplex norm");
  return out;
}

SimplexConfig SimplexConfig::unit_edge(int n) {
  IntVec e1(static_cast<std::size_t>(n), 0);
  e1[0] = 1;
  return from_vertices(n, {e1});
}

double SimplexConfig::norm() const { return std::sqrt(static_cast<double>(norm_sq_)); }

std::string to_string(CopyKind kind) { return kind == CopyKind::sphere ? "sphere" : "simplex"; }

CopyKind parse_copy_kind(const std::string& s) {
  if (s == "sphere") return CopyKind::sphere;
  if (s == "simplex") return CopyKind::simplex;
  throw UsageError("unknown copy-set kind '" + s + "'");
}

std::vector<std::uint64_t> representation_counts(int n, std::int64_t m_max) {
  if (n < 1) throw UsageError("representation counts need n >= 1");
  if (m_max < 0) return {};
  const auto size = static_cast<std::size_t>(m_max) + 1;
  // ways[r] = number of y in Z^d with |y|^2 = r, built one coordinate at a time.
  std::vector<std::uint64_t> ways(size, 0), next(size, 0);
  ways[0] = 1;
  for (int d = 0; d < n; ++d) {
    std::fill(next.begin(), next.end(), 0);
    for (std::int64_t r = 0; r <= m_max; ++r) {
      const std::uint64_t base = ways[static_cast<std::size_t>(r)];
      if (base == 0) continue;
      for (std::int64_t y = 0; r + y * y <= m_max; ++y) {
        const std::uint64_t mult = y == 0 ? 1 : 2;
        std::uint64_t add = 0;
        auto& slot = next[static_cast<std::size_t>(r + y * y)];
        if (__builtin_mul_overflow(base, mult, &add) || __builtin_add_overflow(slot, add, &slot)) {
          throw CapacityError("r_n(m) exceeds 64-bit range");
        }
      }
    }
    std::swap(ways, next);
  }
  return ways;
}

std::uint64_t count_representations(int n, std::int64_t m) {
  if (n < 1) throw UsageError("count_representations needs n >= 1");
  if (m < 0) return 0;
  return representation_counts(n, m).back();
}

CopySet enumerate_sphere(int n, std::int64_t m, Exec exec) {
  if (n < 1) throw UsageError("enumerate_sphere needs n >= 1");
  CopySet out;
  out.kind = CopyKind::sphere;
  out.n = n;
  out.k = 1;
  out.lambda_sq = m;
  out.dist_sq = {{0, 1}, {1, 0}};
  if (m < 0) return out;
  out.coords = run_enumeration(n, {{0}, {m, 0}}, exec);
  return out;
}

CopySet enumerate_simplex_copies(const SimplexConfig& simplex, std::int64_t lambda_sq, Exec exec) {
  if (lambda_sq < 1) throw UsageError("lambda_sq must be >= 1");
  const int k = simplex.k();
  IntMatrix target(static_cast<std::size_t>(k + 1));
  for (int i = 0; i <= k; ++i) {
    target[i].resize(static_cast<std::size_t>(i));
    for (int j = 0; j < i; ++j) target[i][j] = checked_mul(lambda_sq, simplex.dist_sq(i, j), "lambda_sq * d_ij");
  }
  CopySet out;
  out.kind = CopyKind::simplex;
  out.n = simplex.n();
  out.k = k;
  out.lambda_sq = lambda_sq;
  out.dist_sq = simplex.dist_sq();
  out.coords = run_enumeration(simplex.n(), target, exec);
  return out;
}

bool verify_isometry(const SimplexConfig& simplex, std::int64_t lambda_sq, std::span<const std::int64_t> candidate) {
  const int n = simplex.n();
  const int k = simplex.k();
  if (static_cast<int>(candidate.size()) != n * k) throw UsageError("candidate dimension must be n*k");
  auto coord = [&](int i, int c) -> i128 { return i == 0 ? 0 : candidate[static_cast<std::size_t>((i - 1) * n + c)]; };
  for (int i = 0; i <= k; ++i) {
    for (int j = i + 1; j <= k; ++j) {
      i128 acc = 0;
      for (int c = 0; c < n; ++c) {
        const i128 d = coord(i, c) - coord(j, c);
        acc += d * d;
      }
      if (acc != static_cast<i128>(lambda_sq) * simplex.dist_sq(i, j)) return false;
    }
  }
  return true;
}

std::vector<ScalingRow> cardinality_scaling_report(const SimplexConfig& simplex, std::span<const std::int64_t> lambdas,
                                                   const CopySetProvider& provider) {
  std::vector<ScalingRow> rows;
  const int exponent = simplex.scaling_exponent();
  for (const std::int64_t lambda : lambdas) {
    if (lambda < 1) throw UsageError("dilation lambda must be >= 1");
    const std::int64_t lambda_sq = checked_mul(lambda, lambda, "lambda^2");
    const CopySet copies = provider ? provider(simplex, lambda_sq) : enumerate_simplex_copies(simplex, lambda_sq);
    ScalingRow row;
    row.lambda = lambda;
    row.count = copies.count();
    row.ratio = static_cast<double>(row.count) / std::pow(static_cast<double>(lambda), exponent);
    row.regime_violated = !simplex.in_counting_regime();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace simplexvar
