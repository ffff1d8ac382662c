#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>

#include "simplexvar/lattice_geometry.hpp"

namespace simplexvar {

// Text serialization of a CopySet: one header line
//
//   copyset kind=<sphere|simplex> n=<n> k=<k> lambda_sq=<l2> dist_sq=<r0;r1;...> count=<c> checksum=<hex>
//
// where each dist_sq row is comma separated, followed by `count` rows of
// n*k space-separated decimal integers in canonical order. The checksum is
// FNV-1a 64 over the row text (including newlines).
void write_copyset(std::ostream& os, const CopySet& set);

// Throws UsageError on malformed input or checksum mismatch.
CopySet read_copyset(std::istream& is);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);

/// Disk-backed copy-set cache. Files are written atomically (temp + rename)
/// and re-validated on load; a corrupted or mismatching file is discarded
/// and the set re-enumerated.
class CopySetCache {
 public:
  using Logger = std::function<void(const std::string&)>;

  explicit CopySetCache(std::filesystem::path dir, Logger log = {});

  // `configured` unless SIMPLEXVAR_CACHE_DIR is set in the environment.
  static std::filesystem::path resolve_dir(const std::filesystem::path& configured);

  CopySet simplex(const SimplexConfig& simplex, std::int64_t lambda_sq);
  CopySet sphere(int n, std::int64_t m);

  CopySetProvider provider();

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t rejected() const { return rejected_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  CopySet fetch(const std::string& key, const std::function<CopySet()>& enumerate,
                const std::function<bool(const CopySet&)>& matches);

  std::filesystem::path dir_;
  Logger log_;
  std::map<std::string, CopySet> memory_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace simplexvar
