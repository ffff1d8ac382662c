#include "simplexvar/copyset_io.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "simplexvar/errors.hpp"

namespace simplexvar {

namespace {

std::string rows_text(const CopySet& set) {
  std::string out;
  const int dim = set.dim();
  for (std::size_t i = 0; i < set.count(); ++i) {
    auto p = set.point(i);
    for (int c = 0; c < dim; ++c) {
      if (c) out += ' ';
      out += std::to_string(p[static_cast<std::size_t>(c)]);
    }
    out += '\n';
  }
  return out;
}

std::string dist_text(const IntMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ';';
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      if (j) out += ',';
      out += std::to_string(m[i][j]);
    }
  }
  return out;
}

IntMatrix parse_dist(const std::string& s) {
  IntMatrix out;
  std::stringstream rows(s);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::vector<std::int64_t> r;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) r.push_back(std::stoll(cell));
    out.push_back(std::move(r));
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string cache_key(CopyKind kind, int n, std::int64_t lambda_sq, const IntMatrix& dist) {
  // Copy sets depend on the simplex only through n and its distance matrix.
  std::string key = to_string(kind) + "_n" + std::to_string(n) + "_l" + std::to_string(lambda_sq) + "_d" +
                    hex64(fnv1a64(dist_text(dist)));
  return key;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_copyset(std::ostream& os, const CopySet& set) {
  const std::string body = rows_text(set);
  os << "copyset kind=" << to_string(set.kind) << " n=" << set.n << " k=" << set.k << " lambda_sq=" << set.lambda_sq
     << " dist_sq=" << dist_text(set.dist_sq) << " count=" << set.count() << " checksum=" << hex64(fnv1a64(body))
     << '\n'
     << body;
}

CopySet read_copyset(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw UsageError("copyset: missing header");
  std::stringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "copyset") throw UsageError("copyset: bad header tag");
  std::map<std::string, std::string> fields;
  std::string token;
  while (hs >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) throw UsageError("copyset: bad header field '" + token + "'");
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  for (const char* key : {"kind", "n", "k", "lambda_sq", "dist_sq", "count", "checksum"}) {
    if (!fields.count(key)) throw UsageError(std::string("copyset: header lacks ") + key);
  }
  CopySet set;
  std::size_t count = 0;
  try {
    set.kind = parse_copy_kind(fields["kind"]);
    set.n = std::stoi(fields["n"]);
    set.k = std::stoi(fields["k"]);
    set.lambda_sq = std::stoll(fields["lambda_sq"]);
    set.dist_sq = parse_dist(fields["dist_sq"]);
    count = static_cast<std::size_t>(std::stoull(fields["count"]));
  } catch (const std::logic_error& e) {
    throw UsageError(std::string("copyset: bad header value: ") + e.what());
  }
  if (set.n < 1 || set.k < 1) throw UsageError("copyset: bad dimensions");

  std::string body;
  std::string line;
  const auto dim = static_cast<std::size_t>(set.dim());
  set.coords.reserve(count * dim);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw UsageError("copyset: truncated body");
    body += line;
    body += '\n';
    std::stringstream ls(line);
    std::int64_t v = 0;
    std::size_t got = 0;
    while (ls >> v) {
      set.coords.push_back(v);
      ++got;
    }
    if (got != dim) throw UsageError("copyset: row has wrong width");
  }
  if (hex64(fnv1a64(body)) != fields["checksum"]) throw UsageError("copyset: checksum mismatch");
  return set;
}

CopySetCache::CopySetCache(std::filesystem::path dir, Logger log) : dir_(std::move(dir)), log_(std::move(log)) {}

std::filesystem::path CopySetCache::resolve_dir(const std::filesystem::path& configured) {
  if (const char* env = std::getenv("SIMPLEXVAR_CACHE_DIR"); env && *env) return env;
  return configured;
}

CopySet CopySetCache::fetch(const std::string& key, const std::function<CopySet()>& enumerate,
                            const std::function<bool(const CopySet&)>& matches) {
  if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  const auto path = dir_ / (key + ".copyset");
  if (!dir_.empty() && std::filesystem::exists(path)) {
    try {
      std::ifstream in(path);
      CopySet set = read_copyset(in);
      if (!matches(set)) throw UsageError("copyset: parameters do not match cache key");
      ++hits_;
      if (log_) log_("cache hit: " + key);
      return memory_.emplace(key, std::move(set)).first->second;
    } catch (const UsageError& e) {
      ++rejected_;
      if (log_) log_("cache reject: " + key + " (" + e.what() + "), re-enumerating");
    }
  }
  ++misses_;
  if (log_) log_("cache miss: " + key + ", enumerating");
  CopySet set = enumerate();
  if (!dir_.empty()) {
    std::filesystem::create_directories(dir_);
    const auto tmp = dir_ / (key + ".copyset.tmp");
    {
      std::ofstream out(tmp, std::ios::trunc);
      write_copyset(out, set);
      if (!out) throw std::runtime_error("copyset cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }
  return memory_.emplace(key, std::move(set)).first->second;
}

CopySet CopySetCache::simplex(const SimplexConfig& simplex, std::int64_t lambda_sq) {
  const std::string key = cache_key(CopyKind::simplex, simplex.n(), lambda_sq, simplex.dist_sq());
  return fetch(
      key, [&] { return enumerate_simplex_copies(simplex, lambda_sq); },
      [&](const CopySet& s) {
        return s.kind == CopyKind::simplex && s.n == simplex.n() && s.k == simplex.k() && s.lambda_sq == lambda_sq &&
               s.dist_sq == simplex.dist_sq();
      });
}

CopySet CopySetCache::sphere(int n, std::int64_t m) {
  const IntMatrix unit{{0, 1}, {1, 0}};
  const std::string key = cache_key(CopyKind::sphere, n, m, unit);
  return fetch(
      key, [&] { return enumerate_sphere(n, m); },
      [&](const CopySet& s) { return s.kind == CopyKind::sphere && s.n == n && s.k == 1 && s.lambda_sq == m; });
}

CopySetProvider CopySetCache::provider() {
  return [this](const SimplexConfig& s, std::int64_t lambda_sq) { return simplex(s, lambda_sq); };
}

}  // namespace simplexvar
