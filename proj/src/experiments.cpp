#include "simplexvar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "simplexvar/averaging.hpp"
#include "simplexvar/dyadic.hpp"
#include "simplexvar/errors.hpp"
#include "simplexvar/littlewood_paley.hpp"
#include "simplexvar/rng.hpp"
#include "simplexvar/variation.hpp"

namespace simplexvar {

namespace {

constexpr std::size_t kMaxGridPoints = std::size_t{1} << 24;

const std::map<ExperimentId, std::string>& id_names() {
  static const std::map<ExperimentId, std::string> names = {
      {ExperimentId::enumerate, "enumerate"},   {ExperimentId::count, "count"},
      {ExperimentId::scaling, "scaling"},       {ExperimentId::multiplier_check, "multiplier-check"},
      {ExperimentId::variation, "variation"},   {ExperimentId::jump, "jump"},
      {ExperimentId::local_sup, "local-sup"},   {ExperimentId::decay, "decay"},
  };
  return names;
}

// ---- config parsing ----

const std::set<std::string>& top_keys() {
  static const std::set<std::string> keys = {"seed", "cache_dir", "output_dir", "simplex", "grid", "trials",
                                             "regime_override", "generator", "box_side", "experiments"};
  return keys;
}

const std::set<std::string>& section_keys() {
  static const std::set<std::string> keys = {
      "seed",      "simplex",  "grid",       "trials",      "regime_override", "generator",       "box_side",
      "lambda_sq", "lambdas",  "band",       "n",           "m_max",           "simplices",       "j",
      "l_span",    "l_extend", "frequencies", "stability_tolerance", "uniformity_factor", "scales",
      "extended_scales", "r",  "lam",        "growth_limit", "l",              "stride",          "m"};
  return keys;
}

template <class T>
void read(const Json& sec, const char* key, T& out) {
  if (!sec.contains(key)) return;
  try {
    out = sec.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

SimplexSpec parse_simplex(const Json& j) {
  if (!j.is_object()) throw ConfigError("simplex must be an object with n and vertices");
  for (const auto& [k, v] : j.items()) {
    if (k != "n" && k != "vertices") throw ConfigError("unknown simplex key '" + k + "'");
  }
  SimplexSpec s;
  if (!j.contains("n") || !j.contains("vertices")) throw ConfigError("simplex needs n and vertices");
  read(j, "n", s.n);
  read(j, "vertices", s.vertices);
  return s;
}

void apply_section(const Json& sec, ExperimentConfig& cfg, bool top) {
  if (!sec.is_object()) throw ConfigError("config section must be an object");
  for (const auto& [k, v] : sec.items()) {
    const bool known = top ? top_keys().count(k) : section_keys().count(k);
    if (!known) throw ConfigError("unknown config key '" + k + "'");
  }
  read(sec, "seed", cfg.seed);
  read(sec, "grid", cfg.grid);
  read(sec, "trials", cfg.trials);
  read(sec, "regime_override", cfg.regime_override);
  read(sec, "generator", cfg.generator);
  read(sec, "box_side", cfg.box_side);
  if (sec.contains("simplex")) cfg.simplex = parse_simplex(sec["simplex"]);
  if (top) {
    std::string dir;
    if (sec.contains("cache_dir")) {
      read(sec, "cache_dir", dir);
      cfg.cache_dir = dir;
    }
    if (sec.contains("output_dir")) {
      read(sec, "output_dir", dir);
      cfg.output_dir = dir;
    }
    return;
  }
  read(sec, "lambda_sq", cfg.lambda_sq);
  read(sec, "lambdas", cfg.lambdas);
  read(sec, "band", cfg.band);
  read(sec, "n", cfg.count_n);
  read(sec, "m_max", cfg.m_max);
  if (sec.contains("simplices")) {
    if (!sec["simplices"].is_array()) throw ConfigError("simplices must be a list");
    cfg.simplices.clear();
    for (const auto& s : sec["simplices"]) cfg.simplices.push_back(parse_simplex(s));
  }
  read(sec, "j", cfg.bands_j);
  read(sec, "l_span", cfg.l_span);
  read(sec, "l_extend", cfg.l_extend);
  read(sec, "frequencies", cfg.frequencies);
  read(sec, "stability_tolerance", cfg.stability_tolerance);
  read(sec, "uniformity_factor", cfg.uniformity_factor);
  read(sec, "scales", cfg.scales);
  read(sec, "extended_scales", cfg.extended_scales);
  read(sec, "r", cfg.r_list);
  read(sec, "lam", cfg.lam_grid);
  read(sec, "growth_limit", cfg.growth_limit);
  // "l" is a single level for local-sup and a list for decay.
  if (sec.contains("l")) {
    if (sec["l"].is_array()) {
      read(sec, "l", cfg.levels_l);
    } else {
      read(sec, "l", cfg.level);
    }
  }
  read(sec, "stride", cfg.stride);
  read(sec, "m", cfg.levels_m);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_increasing(const std::vector<std::int64_t>& v, const std::string& what) {
  require(!v.empty(), what + " must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] >= 1, what + " entries must be >= 1");
    require(i == 0 || v[i] > v[i - 1], what + " must increase strictly");
  }
}

std::size_t grid_points(int period, int dim) {
  std::size_t size = 1;
  for (int d = 0; d < dim; ++d) {
    if (size > kMaxGridPoints / static_cast<std::size_t>(period)) return kMaxGridPoints + 1;
    size *= static_cast<std::size_t>(period);
  }
  return size;
}

void validate(const ExperimentConfig& cfg) {
  require(cfg.trials >= 1 && cfg.trials <= 100000, "trials must lie in [1, 100000]");
  require(cfg.grid >= 2, "grid must be >= 2");
  GeneratorSpec::Kind kind{};
  try {
    kind = GeneratorSpec::parse_kind(cfg.generator);
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  require(kind != GeneratorSpec::Kind::fourier_band, "generator fourier-band is reserved for local-sup");
  require(cfg.box_side >= 1 && cfg.box_side <= cfg.grid, "box_side must lie in [1, grid]");
  const auto simplex = cfg.simplex.build();
  const bool dense = cfg.id == ExperimentId::variation || cfg.id == ExperimentId::jump ||
                     cfg.id == ExperimentId::local_sup || cfg.id == ExperimentId::decay;
  if (dense) {
    require(grid_points(cfg.grid, simplex.dim()) <= kMaxGridPoints, "grid N^(nk) exceeds 2^24 points");
  }
  switch (cfg.id) {
    case ExperimentId::enumerate:
      require(!cfg.lambda_sq.empty(), "enumerate needs a lambda_sq list");
      for (auto v : cfg.lambda_sq) require(v >= 1, "lambda_sq entries must be >= 1");
      break;
    case ExperimentId::count:
      require(cfg.count_n >= 1 && cfg.count_n <= 64, "count: n must lie in [1, 64]");
      require(cfg.m_max >= 0 && cfg.m_max <= 10'000'000, "count: m_max must lie in [0, 1e7]");
      break;
    case ExperimentId::scaling:
      require_increasing(cfg.lambdas, "lambdas");
      require(cfg.band >= 1.0, "band must be >= 1");
      break;
    case ExperimentId::multiplier_check:
      require(!cfg.bands_j.empty(), "multiplier-check needs a j list");
      for (int j : cfg.bands_j) require(j >= 0 && j <= 5, "multiplier-check: j must lie in [0, 5] (t_j must fit 64 bits)");
      require(cfg.l_span >= 1 && cfg.l_extend >= 1, "l_span and l_extend must be >= 1");
      require(cfg.frequencies >= 2 && (cfg.frequencies & (cfg.frequencies - 1)) == 0,
              "frequencies must be a power of two");
      require(cfg.stability_tolerance > 0.0 && cfg.uniformity_factor >= 1.0, "bad tolerance or uniformity factor");
      break;
    case ExperimentId::variation:
      require_increasing(cfg.scales, "scales");
      require_increasing(cfg.extended_scales, "extended_scales");
      require(!cfg.r_list.empty(), "r list must not be empty");
      for (double r : cfg.r_list) require(r > 2.0, "variation needs r > 2");
      require(cfg.growth_limit >= 0.0, "growth_limit must be >= 0");
      require(cfg.regime_override || simplex.in_counting_regime(),
              "n >= 2k+3 required (set regime_override to measure outside that range)");
      break;
    case ExperimentId::jump:
      require_increasing(cfg.scales, "scales");
      require(!cfg.lam_grid.empty(), "lam grid must not be empty");
      for (double lam : cfg.lam_grid) require(lam > 0.0, "lam entries must be > 0");
      break;
    case ExperimentId::local_sup:
      require(cfg.level >= 0 && cfg.level <= 14, "local-sup: l must lie in [0, 14]");
      require(cfg.stride >= 1, "stride must be >= 1");
      require(!cfg.bands_j.empty(), "local-sup needs a j list");
      for (int j : cfg.bands_j) require(j >= 1, "local-sup: j must be >= 1 (the bound has a 1/j factor)");
      break;
    case ExperimentId::decay: {
      require(!cfg.levels_l.empty() && !cfg.levels_m.empty(), "decay needs l and m lists");
      for (int l : cfg.levels_l) require(l >= 0 && l <= 14, "decay: l must lie in [0, 14]");
      for (int m : cfg.levels_m) require(m >= 0, "decay: m must be >= 0");
      const DyadicScheme scheme = DyadicScheme::for_simplex(simplex);
      const int top = scheme.top_level(cfg.grid);
      const int need = std::max(*std::max_element(cfg.levels_l.begin(), cfg.levels_l.end()),
                                *std::max_element(cfg.levels_m.begin(), cfg.levels_m.end()));
      require(need <= top, "decay: grid " + std::to_string(cfg.grid) + " is not divisible by B^" +
                               std::to_string(need) + " (B = " + std::to_string(scheme.base) + ")");
      break;
    }
  }
}

// ---- shared helpers ----

CopySetProvider provider_for(const RunContext& ctx) {
  if (ctx.cache) return ctx.cache->provider();
  auto memo = std::make_shared<std::map<std::pair<std::string, std::int64_t>, CopySet>>();
  return [memo](const SimplexConfig& s, std::int64_t l2) {
    std::string key;
    for (const auto& v : s.vertices()) {
      for (auto c : v) key += std::to_string(c) + ",";
      key += ";";
    }
    auto it = memo->find({key, l2});
    if (it == memo->end()) it = memo->emplace(std::make_pair(key, l2), enumerate_simplex_copies(s, l2)).first;
    return it->second;
  };
}

void log_to(const RunContext& ctx, const std::string& msg) {
  if (ctx.log) ctx.log(msg);
}

Report start_report(const ExperimentConfig& cfg) {
  Report r;
  r.id = to_string(cfg.id);
  r.config = cfg.to_json();
  const auto simplex = cfg.simplex.build();
  r.provenance["dyadic_base"] = DyadicScheme::for_simplex(simplex).base;
  r.provenance["dyadic_base_rule"] = "ceil(2|s|)";
  return r;
}

DenseGrid trial_function(const ExperimentConfig& cfg, int dim, int trial) {
  GeneratorSpec spec;
  spec.kind = GeneratorSpec::parse_kind(cfg.generator);
  spec.period = cfg.grid;
  spec.dim = dim;
  spec.box_side = cfg.box_side;
  return random_test_function(trial_seed(cfg.seed, static_cast<std::uint64_t>(trial)), spec);
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::int64_t copy_diameter(const CopySet& set) {
  if (set.empty()) return 0;
  AverageKernel k;
  k.base = set;
  return k.diameter();
}

// Subfamily of `family` restricted to the dilations in `keep`.
AverageFamily restrict_family(const AverageFamily& family, const std::vector<std::int64_t>& keep) {
  AverageFamily out;
  out.real_valued = family.real_valued;
  for (std::size_t i = 0; i < family.dilations.size(); ++i) {
    if (std::find(keep.begin(), keep.end(), family.dilations[i]) != keep.end()) {
      out.dilations.push_back(family.dilations[i]);
      out.averages.push_back(family.averages[i]);
    }
  }
  return out;
}

// Circular averages stand in for the non-periodic ones only when N >= 2 * kernel diameter.
void require_no_wraparound(const ExperimentConfig& cfg, const SimplexConfig& simplex,
                           const std::vector<std::int64_t>& dilations, const CopySetProvider& provider) {
  for (auto lambda : dilations) {
    const auto d = copy_diameter(provider(simplex, lambda * lambda));
    require(cfg.grid >= 2 * d, "grid " + std::to_string(cfg.grid) + " is smaller than twice the kernel diameter " +
                                   std::to_string(d) + " at dilation " + std::to_string(lambda));
  }
}

std::int64_t jacobi_four_squares(std::int64_t m) {
  if (m == 0) return 1;
  std::int64_t s = 0;
  for (std::int64_t d = 1; d * d <= m; ++d) {
    if (m % d != 0) continue;
    if (d % 4 != 0) s += d;
    const std::int64_t e = m / d;
    if (e != d && e % 4 != 0) s += e;
  }
  return 8 * s;
}

// Per-axis sizes 2^b with the bits of `points` spread over dim axes.
std::vector<int> split_frequencies(int points, int dim) {
  int bits = 0;
  while ((1 << bits) < points) ++bits;
  std::vector<int> axes(static_cast<std::size_t>(dim), 1);
  for (int b = 0; b < bits; ++b) axes[static_cast<std::size_t>(b % dim)] *= 2;
  return axes;
}

}  // namespace

std::string to_string(ExperimentId id) { return id_names().at(id); }

ExperimentId parse_experiment_id(const std::string& name) {
  for (const auto& [id, n] : id_names()) {
    if (n == name) return id;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

SimplexConfig SimplexSpec::build() const {
  try {
    return SimplexConfig::from_vertices(n, vertices);
  } catch (const UsageError& e) {
    throw ConfigError(std::string("bad simplex: ") + e.what());
  }
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["id"] = to_string(id);
  j["simplex"] = {{"n", simplex.n}, {"vertices", simplex.vertices}};
  j["grid"] = grid;
  j["trials"] = trials;
  j["seed"] = seed;
  j["regime_override"] = regime_override;
  j["generator"] = generator;
  switch (id) {
    case ExperimentId::enumerate:
      j["lambda_sq"] = lambda_sq;
      break;
    case ExperimentId::count:
      j["n"] = count_n;
      j["m_max"] = m_max;
      break;
    case ExperimentId::scaling:
      j["lambdas"] = lambdas;
      j["band"] = band;
      break;
    case ExperimentId::multiplier_check: {
      Json list = Json::array();
      for (const auto& s : simplices) list.push_back({{"n", s.n}, {"vertices", s.vertices}});
      j["simplices"] = list;
      j["j"] = bands_j;
      j["l_span"] = l_span;
      j["l_extend"] = l_extend;
      j["frequencies"] = frequencies;
      j["stability_tolerance"] = stability_tolerance;
      j["uniformity_factor"] = uniformity_factor;
      break;
    }
    case ExperimentId::variation:
      j["scales"] = scales;
      j["extended_scales"] = extended_scales;
      j["r"] = r_list;
      j["growth_limit"] = growth_limit;
      break;
    case ExperimentId::jump:
      j["scales"] = scales;
      j["lam"] = lam_grid;
      break;
    case ExperimentId::local_sup:
      j["l"] = level;
      j["j"] = bands_j;
      j["stride"] = stride;
      break;
    case ExperimentId::decay:
      j["l"] = levels_l;
      j["m"] = levels_m;
      break;
  }
  if (generator == "box-indicator") j["box_side"] = box_side;
  return j;
}

ExperimentConfig resolve_config(const Json& doc, ExperimentId id) {
  ExperimentConfig cfg;
  cfg.id = id;
  // Per-experiment defaults that differ from the struct defaults.
  if (id == ExperimentId::jump) cfg.scales = {1, 2, 4};
  if (id == ExperimentId::local_sup) cfg.bands_j = {1, 2, 3};
  if (!doc.is_null()) {
    apply_section(doc, cfg, true);
    if (doc.contains("experiments")) {
      const Json& ex = doc["experiments"];
      if (!ex.is_object()) throw ConfigError("experiments must be an object");
      for (const auto& [name, sec] : ex.items()) parse_experiment_id(name);
      const auto name = to_string(id);
      if (ex.contains(name)) apply_section(ex[name], cfg, false);
    }
  }
  if (id == ExperimentId::multiplier_check && cfg.simplices.empty()) cfg.simplices = {cfg.simplex};
  validate(cfg);
  return cfg;
}

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

LineFit fit_line(const std::vector<std::pair<double, double>>& points) {
  LineFit fit;
  const auto n = static_cast<double>(points.size());
  if (points.size() < 2) return fit;
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (const auto& [x, y] : points) {
    const double e = y - (fit.slope * x + fit.intercept);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

// ---- experiments ----

ExperimentOutput run_enumerate(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto simplex = cfg.simplex.build();
  const auto provider = provider_for(ctx);
  ExperimentOutput out;
  Report& rep = out.report = start_report(cfg);
  ExperimentOutput::Table table{"enumerate", "lambda_sq", "count", {}};
  bool all_ok = true;
  for (const auto l2 : cfg.lambda_sq) {
    const CopySet set = provider(simplex, l2);
    bool ok = true;
    for (std::size_t i = 0; i < set.count() && ok; ++i) ok = verify_isometry(simplex, l2, set.point(i));
    all_ok = all_ok && ok;
    rep.trials.push_back({{"lambda_sq", l2}, {"count", set.count()}, {"isometric", ok}});
    table.rows.emplace_back(static_cast<double>(l2), static_cast<double>(set.count()));
    if (set.empty()) rep.warn("no copies at lambda_sq = " + std::to_string(l2));
  }
  std::uint64_t total = 0;
  for (const auto& t : rep.trials) total += t["count"].get<std::uint64_t>();
  rep.aggregates = {{"total_points", total}, {"dilations", cfg.lambda_sq.size()}};
  rep.check("all_isometric", all_ok, "every enumerated copy satisfies the distance constraints");
  out.tables.push_back(std::move(table));
  return out;
}

ExperimentOutput run_count(const ExperimentConfig& cfg, const RunContext&) {
  ExperimentOutput out;
  Report& rep = out.report = start_report(cfg);
  const auto counts = representation_counts(cfg.count_n, cfg.m_max);
  ExperimentOutput::Table table{"count_n" + std::to_string(cfg.count_n), "m", "r", {}};
  for (std::int64_t m = 0; m <= cfg.m_max; ++m) {
    const auto c = counts[static_cast<std::size_t>(m)];
    rep.trials.push_back({{"m", m}, {"r", c}});
    table.rows.emplace_back(static_cast<double>(m), static_cast<double>(c));
  }
  std::uint64_t total = 0;
  for (const auto c : counts) total += c;
  rep.aggregates = {{"n", cfg.count_n}, {"m_max", cfg.m_max}, {"total", total}};
  // Independent cross-checks: explicit enumeration for small m, Jacobi's formula for n = 4.
  const std::int64_t small = std::min<std::int64_t>(cfg.m_max, cfg.count_n <= 6 ? 64 : 16);
  bool enum_ok = true;
  for (std::int64_t m = 0; m <= small; ++m) {
    enum_ok = enum_ok && enumerate_sphere(cfg.count_n, m).count() == counts[static_cast<std::size_t>(m)];
  }
  rep.check("enumeration_agrees", enum_ok, "m <= " + std::to_string(small));
  if (cfg.count_n == 4) {
    bool ok = true;
    for (std::int64_t m = 0; m <= cfg.m_max; ++m) {
      ok = ok && static_cast<std::int64_t>(counts[static_cast<std::size_t>(m)]) == jacobi_four_squares(m);
    }
    rep.check("jacobi_four_squares", ok, "r_4(m) = 8 * sum of divisors not divisible by 4");
  }
  out.tables.push_back(std::move(table));
  return out;
}

ExperimentOutput run_scaling(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto simplex = cfg.simplex.build();
  ExperimentOutput out;
  Report& rep = out.report = start_report(cfg);
  const auto rows = cardinality_scaling_report(simplex, cfg.lambdas, provider_for(ctx));
  ExperimentOutput::Table table{"scaling", "lambda", "normalized_count", {}};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool violated = false;
  for (const auto& r : rows) {
    rep.trials.push_back({{"lambda", r.lambda}, {"count", r.count}, {"ratio", r.ratio}, {"regime_violated", r.regime_violated}});
    table.rows.emplace_back(static_cast<double>(r.lambda), r.ratio);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    violated = violated || r.regime_violated;
  }
  if (violated) rep.warn("n < 2k+3: the counting asymptotics are not guaranteed in this regime");
  const double spread = lo > 0.0 ? hi / lo : 0.0;
  rep.aggregates = {{"exponent", simplex.scaling_exponent()}, {"max_ratio", hi}, {"min_ratio", lo}, {"spread", spread}};
  rep.check("ratio_band", lo > 0.0 && spread <= cfg.band,
            "max/min = " + format_number(spread) + ", band " + format_number(cfg.band));
  out.tables.push_back(std::move(table));
  return out;
}

ExperimentOutput run_prop_square_multiplier(const ExperimentConfig& cfg, const RunContext& ctx) {
  ExperimentOutput out;
  Report& rep = out.report = start_report(cfg);
  bool finite = true, stable = true, monotone = true, zero_row = true, uniform = true;
  Json uniformity = Json::array();
  for (std::size_t si = 0; si < cfg.simplices.size(); ++si) {
    const auto simplex = cfg.simplices[si].build();
    const int dim = simplex.dim();
    const auto axes = split_frequencies(cfg.frequencies, dim);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const int j : cfg.bands_j) {
      const int first = 1 << j;
      const int l_max = first + cfg.l_span;
      const int l_ext = l_max + cfg.l_extend;
      bool below = false, overlap = false;
      for (int l = first; l <= l_ext + 1; ++l) {
        const auto spec = MultiplierSpec::make(simplex, l, j);
        below = below || spec.width_below_step();
        overlap = overlap || spec.arcs_overlap();
      }
      if (overlap && !below) {
        rep.warn("kn=" + std::to_string(dim) + " j=" + std::to_string(j) +
                 ": width < 1.5 step for some l; neighbouring translates overlap and the sums include that artefact");
      }
      if (below) {
        rep.warn("kn=" + std::to_string(dim) + " j=" + std::to_string(j) +
                 ": width <= step for some l; the bump is sampled outside its nominal range");
      }
      double best = 0.0, best_ext = 0.0;
      std::vector<double> arg(static_cast<std::size_t>(dim), 0.0);
      std::vector<double> best_partial;
      std::vector<int> idx(static_cast<std::size_t>(dim), 0);
      std::vector<double> xi(static_cast<std::size_t>(dim));
      while (true) {
        for (int d = 0; d < dim; ++d) xi[static_cast<std::size_t>(d)] = static_cast<double>(idx[static_cast<std::size_t>(d)]) / axes[static_cast<std::size_t>(d)];
        const auto p = square_sum_delta(simplex, j, xi, l_ext);
        for (std::size_t i = 1; i < p.size(); ++i) monotone = monotone && p[i] >= p[i - 1];
        const double base = p[static_cast<std::size_t>(l_max - first)];
        if (base > best || best_partial.empty()) {
          best = base;
          arg = xi;
          best_partial = p;
        }
        best_ext = std::max(best_ext, p.back());
        int d = dim - 1;
        while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == axes[static_cast<std::size_t>(d)]) idx[static_cast<std::size_t>(d--)] = 0;
        if (d < 0) break;
      }
      const std::vector<double> origin(static_cast<std::size_t>(dim), 0.0);
      const double zero = square_sum_delta(simplex, j, origin, l_ext).back();
      if (!below) zero_row = zero_row && zero == 0.0;
      const double change = best > 0.0 ? (best_ext - best) / best : 0.0;
      finite = finite && std::isfinite(best) && std::isfinite(best_ext);
      stable = stable && change < cfg.stability_tolerance;
      lo = std::min(lo, best);
      hi = std::max(hi, best);
      rep.trials.push_back({{"simplex", si},
                            {"kn", dim},
                            {"j", j},
                            {"l_min", first},
                            {"l_max", l_max},
                            {"l_extended", l_ext},
                            {"max_sum", best},
                            {"max_sum_extended", best_ext},
                            {"relative_change", change},
                            {"argmax_xi", arg},
                            {"zero_row", zero},
                            {"zero_row_asserted", !below},
                            {"width_below_step", below},
                            {"arcs_overlap", overlap}});
      ExperimentOutput::Table table{"multiplier-check_kn" + std::to_string(dim) + "_s" + std::to_string(si) + "_j" +
                                        std::to_string(j),
                                    "l", "partial_sum", {}};
      for (std::size_t i = 0; i < best_partial.size(); ++i) table.rows.emplace_back(first + static_cast<double>(i), best_partial[i]);
      out.tables.push_back(std::move(table));
      log_to(ctx, "multiplier-check: kn=" + std::to_string(dim) + " j=" + std::to_string(j) + " max=" + format_number(best));
    }
    const double factor = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    uniform = uniform && factor <= cfg.uniformity_factor;
    uniformity.push_back({{"simplex", si}, {"kn", simplex.dim()}, {"constant", hi}, {"spread_across_j", std::isfinite(factor) ? factor : -1.0}});
  }
  rep.aggregates = {{"uniformity", uniformity}};
  rep.check("finite", finite);
  rep.check("tail_stability", stable, "relative change < " + format_number(cfg.stability_tolerance) + " after extending l");
  rep.check("uniform_in_j", uniform, "max/min of the constants across j <= " + format_number(cfg.uniformity_factor));
  rep.check("monotone_partial_sums", monotone);
  rep.check("zero_frequency_row", zero_row, "asserted where every width >= step");
  return out;
}

ExperimentOutput run_theorem_variation(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto simplex = cfg.simplex.build();
  const auto provider = provider_for(ctx);
  ExperimentOutput out;
  Report& rep = out.report = start_report(cfg);
  if (!simplex.in_counting_regime()) rep.warn("n < 2k+3: measured under regime_override");
  std::vector<std::int64_t> all = cfg.scales;
  all.insert(all.end(), cfg.extended_scales.begin(), cfg.extended_scales.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  require_no_wraparound(cfg, simplex, all, provider);
  const std::size_t nr = cfg.r_list.size();
  std::vector<double> max_base(nr, 0.0), max_ext(nr, 0.0);
  std::set<std::int64_t> skipped;
  for (int t = 0; t < cfg.trials; ++t) {
    const DenseGrid f = trial_function(cfg, simplex.dim(), t);
    const double norm = lp_norm(f, 2.0);
    const auto family = average_family(f, simplex, all, provider, Exec::parallel,
                                       [&](const std::string& m) { log_to(ctx, m); });
    skipped.insert(family.skipped.begin(), family.skipped.end());
    const auto base = restrict_family(family, cfg.scales);
    const auto ext = restrict_family(family, cfg.extended_scales);
    Json rb = Json::array(), re = Json::array();
    for (std::size_t i = 0; i < nr; ++i) {
      const double b = base.length() ? safe_ratio(lp_norm(variation_field(base, cfg.r_list[i]), 2.0), norm) : 0.0;
      const double e = ext.length() ? safe_ratio(lp_norm(variation_field(ext, cfg.r_list[i]), 2.0), norm) : 0.0;
      rb.push_back(b);
      re.push_back(e);
      max_base[i] = std::max(max_base[i], b);
      max_ext[i] = std::max(max_ext[i], e);
    }
    rep.trials.push_back({{"trial", t},
                          {"seed", trial_seed(cfg.seed, static_cast<std::uint64_t>(t))},
                          {"f_norm", norm},
                          {"ratio_base", rb},
                          {"ratio_extended", re}});
    log_to(ctx, "variation: trial " + std::to_string(t + 1) + "/" + std::to_string(cfg.trials));
  }
  for (auto s : skipped) rep.warn("dilation " + std::to_string(s) + " has no copies and was skipped");
  Json per_r = Json::array();
  bool ok = true;
  for (std::size_t i = 0; i < nr; ++i) {
    const double growth = max_base[i] > 0.0 ? max_ext[i] / max_base[i] - 1.0 : 0.0;
    ok = ok && growth <= cfg.growth_limit;
    per_r.push_back({{"r", cfg.r_list[i]}, {"max_ratio_base", max_base[i]}, {"max_ratio_extended", max_ext[i]}, {"growth", growth}});
    ExperimentOutput::Table table{"variation_r" + format_number(cfg.r_list[i]), "scale_count", "max_ratio", {}};
    table.rows = {{static_cast<double>(cfg.scales.size()), max_base[i]},
                  {static_cast<double>(cfg.extended_scales.size()), max_ext[i]}};
    out.tables.push_back(std::move(table));
  }
  rep.aggregates = {{"per_r", per_r}};
  rep.check("bounded_growth", ok, "max ratio grows by at most " + format_number(cfg.growth_limit) + " when the scale list is extended");
  return out;
}

ExperimentOutput run_jump_theorem(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto simplex = cfg.simplex.build();
  const auto provider = provider_for(ctx);
  ExperimentOutput out;
  Report& rep = out.report = start_report(cfg);
  require_no_wraparound(cfg, simplex, cfg.scales, provider);
  bool dominated_everywhere = true, norm_bound = true, beyond_zero = true;
  double max_sup = 0.0, max_over_bound = 0.0;
  std::vector<double> lam_sum(cfg.lam_grid.size(), 0.0);
  std::set<std::int64_t> skipped;
  for (int t = 0; t < cfg.trials; ++t) {
    const DenseGrid f = trial_function(cfg, simplex.dim(), t);
    const double norm = lp_norm(f, 2.0);
    const double sup_f = lp_norm(f, INFINITY);
    const auto family = average_family(f, simplex, cfg.scales, provider, Exec::parallel,
                                       [&](const std::string& m) { log_to(ctx, m); });
    skipped.insert(family.skipped.begin(), family.skipped.end());
    if (family.length() == 0) continue;
    const auto sf = square_function_field(family);
    const double bound = safe_ratio(2.0 * lp_norm(sf, 2.0), norm);
    Json per_lam = Json::array();
    double sup = 0.0;
    bool dominated = true;
    for (std::size_t li = 0; li < cfg.lam_grid.size(); ++li) {
      const double lam = cfg.lam_grid[li];
      const auto jf = jump_field(family, lam);
      const double ratio = safe_ratio(lp_norm(jf.scaled, 2.0), norm);
      for (std::size_t i = 0; i < f.size(); ++i) {
        dominated = dominated && jf.scaled[i].real() <= 2.0 * sf[i].real() * (1.0 + 1e-12);
      }
      if (lam > 2.0 * sup_f) beyond_zero = beyond_zero && ratio == 0.0;
      per_lam.push_back(ratio);
      lam_sum[li] += ratio;
      sup = std::max(sup, ratio);
    }
    dominated_everywhere = dominated_everywhere && dominated;
    norm_bound = norm_bound && sup <= bound;
    max_sup = std::max(max_sup, sup);
    max_over_bound = std::max(max_over_bound, safe_ratio(sup, bound));
    rep.trials.push_back({{"trial", t},
                          {"seed", trial_seed(cfg.seed, static_cast<std::uint64_t>(t))},
                          {"f_norm", norm},
                          {"ratio_per_lam", per_lam},
                          {"sup_ratio", sup},
                          {"square_function_bound", bound},
                          {"pointwise_dominated", dominated}});
    log_to(ctx, "jump: trial " + std::to_string(t + 1) + "/" + std::to_string(cfg.trials));
  }
  for (auto s : skipped) rep.warn("dilation " + std::to_string(s) + " has no copies and was skipped");
  ExperimentOutput::Table table{"jump", "lam", "mean_ratio", {}};
  for (std::size_t li = 0; li < cfg.lam_grid.size(); ++li) table.rows.emplace_back(cfg.lam_grid[li], lam_sum[li] / cfg.trials);
  out.tables.push_back(std::move(table));
  rep.aggregates = {{"max_sup_ratio", max_sup}, {"max_sup_over_bound", max_over_bound}};
  rep.check("pointwise_domination", dominated_everywhere, "lam*sqrt(J) <= 2*(sum_l |A_l f|^2)^(1/2) at every point");
  rep.check("norm_bound", norm_bound, "sup_lam ||lam sqrt(J)||/||f|| <= 2 ||SF||/||f|| in every trial");
  rep.check("large_lam_vanishes", beyond_zero, "lam > 2 ||f||_inf gives no jumps");
  return out;
}

std::vector<std::string> local_sup_infeasibility(const ExperimentConfig& cfg) {
  const auto simplex = cfg.simplex.build();
  std::vector<std::string> reasons;
  for (const int j : cfg.bands_j) {
    std::uint64_t t = 0;
    try {
      t = lcm_t(j);
    } catch (const CapacityError&) {
      reasons.push_back("j=" + std::to_string(j) + ": t_j does not fit 64 bits");
      continue;
    }
    const auto arcs = FrequencyArcs::make(simplex, cfg.level, j);
    const std::string tag = "l=" + std::to_string(cfg.level) + " j=" + std::to_string(j) + ": ";
    if (static_cast<std::uint64_t>(cfg.grid) % t != 0) {
      reasons.push_back(tag + "t_j = " + std::to_string(t) + " does not divide N = " + std::to_string(cfg.grid) +
                        ", so the arc centres are not grid frequencies");
    }
    if (arcs.covers_torus()) {
      reasons.push_back(tag + "arc half-width " + format_number(arcs.half_width()) +
                        " >= 1/2, the arcs cover the torus and no frequency lies off them");
      continue;
    }
    bool any = false;
    for (std::int64_t a = 0; a < cfg.grid && !any; ++a) {
      const std::int64_t idx[] = {a};
      any = !arcs.contains_grid(idx, cfg.grid);
    }
    if (!any) reasons.push_back(tag + "every grid frequency lies on the arcs");
  }
  return reasons;
}

namespace {

// Flat indices of grid frequencies outside the arcs; membership is per axis.
std::vector<std::size_t> complement_band(const FrequencyArcs& arcs, int period, int dim) {
  std::vector<char> axis_in(static_cast<std::size_t>(period));
  for (std::int64_t a = 0; a < period; ++a) {
    const std::int64_t idx[] = {a};
    axis_in[static_cast<std::size_t>(a)] = arcs.contains_grid(idx, period);
  }
  std::vector<std::size_t> band;
  const std::size_t size = grid_points(period, dim);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t rest = i;
    bool inside = true;
    for (int d = 0; d < dim; ++d) {
      inside = inside && axis_in[rest % static_cast<std::size_t>(period)];
      rest /= static_cast<std::size_t>(period);
    }
    if (!inside) band.push_back(i);
  }
  return band;
}

// Throws ConfigError when f has spectral mass on the arcs.
void require_off_arcs(const DenseGrid& f, const FrequencyArcs& arcs) {
  const Spectrum s = dft_forward(f);
  double top = 0.0;
  for (const auto& c : s.coefficients) top = std::max(top, std::abs(c));
  std::vector<std::int64_t> a(static_cast<std::size_t>(f.dim()));
  DenseGrid shape(f.period(), f.dim());
  for (std::size_t i = 0; i < s.coefficients.size(); ++i) {
    if (std::abs(s.coefficients[i]) <= 1e-9 * top) continue;
    shape.coords_of(i, a);
    if (arcs.contains_grid(a, f.period())) throw ConfigError("test function has spectrum on the arcs");
  }
}

}  // namespace

ExperimentOutput run_local_sup(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto reasons = local_sup_infeasibility(cfg);
  if (!reasons.empty()) {
    std::string msg = "infeasible local-sup configuration";
    for (const auto& r : reasons) msg += "; " + r;
    throw ConfigError(msg);
  }
  const auto simplex = cfg.simplex.build();
  const auto provider = provider_for(ctx);
  ExperimentOutput out;
  Report& rep = out.report = start_report(cfg);
  const int dim = simplex.dim();
  std::vector<double> max_ratio(cfg.bands_j.size(), 0.0), mean_ratio(cfg.bands_j.size(), 0.0);
  std::size_t skipped = 0;
  bool empty_range = false;
  for (std::size_t ji = 0; ji < cfg.bands_j.size(); ++ji) {
    const int j = cfg.bands_j[ji];
    const auto arcs = FrequencyArcs::make(simplex, cfg.level, j);
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::fourier_band;
    spec.period = cfg.grid;
    spec.dim = dim;
    spec.band = complement_band(arcs, cfg.grid, dim);
    for (int t = 0; t < cfg.trials; ++t) {
      const auto seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(t));
      const DenseGrid f = random_test_function(seed, spec);
      require_off_arcs(f, arcs);
      const auto res = local_sup_average(f, simplex, cfg.level, cfg.stride, provider);
      skipped = std::max(skipped, res.skipped_empty);
      empty_range = empty_range || res.empty_range;
      const double ratio = safe_ratio(lp_norm(res.values, 2.0), lp_norm(f, 2.0));
      max_ratio[ji] = std::max(max_ratio[ji], ratio);
      mean_ratio[ji] += ratio / cfg.trials;
      rep.trials.push_back({{"j", j}, {"trial", t}, {"seed", seed}, {"ratio", ratio}, {"dilations_used", res.used.size()},
                            {"band_size", spec.band.size()}});
    }
    log_to(ctx, "local-sup: j=" + std::to_string(j) + " max ratio " + format_number(max_ratio[ji]));
  }
  if (skipped) rep.warn(std::to_string(skipped) + " dilations in range had no copies and were skipped");
  if (empty_range) rep.warn("no dilation in range has copies; the sup is the zero function");
  ExperimentOutput::Table table{"local-sup", "j", "max_ratio", {}};
  Json per_j = Json::array();
  bool monotone = true;
  double constant = 0.0;
  for (std::size_t ji = 0; ji < cfg.bands_j.size(); ++ji) {
    const int j = cfg.bands_j[ji];
    const double shape = std::pow(2.0, -j / 2.0) / j;
    constant = std::max(constant, max_ratio[ji] / shape);
    per_j.push_back({{"j", j}, {"max_ratio", max_ratio[ji]}, {"mean_ratio", mean_ratio[ji]}, {"ratio_over_bound_shape", max_ratio[ji] / shape}});
    table.rows.emplace_back(j, max_ratio[ji]);
    if (ji > 0) monotone = monotone && max_ratio[ji] <= max_ratio[ji - 1] * (1.0 + 1e-12);
  }
  out.tables.push_back(std::move(table));
  rep.aggregates = {{"per_j", per_j}, {"fitted_constant", constant}};
  rep.check("non_increasing_in_j", monotone, "max ratio over trials is non-increasing in j");
  return out;
}

ExperimentOutput run_lemma_decay(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto simplex = cfg.simplex.build();
  const auto provider = provider_for(ctx);
  const DyadicScheme scheme = DyadicScheme::for_simplex(simplex);
  ExperimentOutput out;
  Report& rep = out.report = start_report(cfg);
  const int dim = simplex.dim();
  std::vector<SmoothedKernel> kernels;
  for (const int l : cfg.levels_l) {
    try {
      kernels.push_back(smoothed_kernel(simplex, l, cfg.grid, PsiSpec{dim}, provider));
    } catch (const EmptyCopySet&) {
      throw ConfigError("decay: no copies at the dyadic dilation 2^" + std::to_string(l));
    }
    if (kernels.back().wraparound) rep.warn("l=" + std::to_string(l) + ": kernel wraps around the period");
    if (kernels.back().width_below_step) rep.warn("l=" + std::to_string(l) + ": smoothing width <= step");
  }
  // Cubes of side B^{-1} hold one lattice point, so E_{-1} = E_0 = identity and D_0 f = 0.
  if (std::find(cfg.levels_m.begin(), cfg.levels_m.end(), 0) != cfg.levels_m.end()) {
    rep.warn("m=0: D_0 f = 0 on the lattice; those cells are skipped");
  }
  std::map<std::pair<int, int>, std::pair<double, int>> acc;  // (l, m) -> (sum of rho, count)
  int skipped = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    const DenseGrid f = trial_function(cfg, dim, t);
    Json rows = Json::array();
    bool any = false;
    for (const int m : cfg.levels_m) {
      if (m == 0) continue;
      const DenseGrid d = martingale_difference(f, scheme, m);
      const double dn = lp_norm(d, 2.0);
      if (dn == 0.0) continue;
      any = true;
      const Spectrum spec = dft_forward(d);
      for (std::size_t li = 0; li < cfg.levels_l.size(); ++li) {
        const int l = cfg.levels_l[li];
        Spectrum s = spec;
        for (std::size_t i = 0; i < s.coefficients.size(); ++i) s.coefficients[i] *= kernels[li].multiplier.coefficients[i];
        DenseGrid diff = dft_inverse(s);
        const DenseGrid e = conditional_expectation(d, scheme, l);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= e[i];
        const double rho = lp_norm(diff, 2.0) / dn;
        rows.push_back({{"l", l}, {"m", m}, {"rho", rho}});
        auto& slot = acc[{l, m}];
        slot.first += rho;
        slot.second += 1;
      }
    }
    if (!any) ++skipped;
    rep.trials.push_back({{"trial", t}, {"seed", trial_seed(cfg.seed, static_cast<std::uint64_t>(t))}, {"skipped", !any}, {"rho", rows}});
    log_to(ctx, "decay: trial " + std::to_string(t + 1) + "/" + std::to_string(cfg.trials));
  }
  if (skipped) rep.warn(std::to_string(skipped) + " trials had D_m f = 0 for every m and were skipped");
  std::vector<std::pair<double, double>> points, upper, lower;
  Json cells = Json::array();
  for (const auto& [lm, v] : acc) {
    const double mean = v.first / v.second;
    const double dist = std::abs(lm.first - lm.second);
    cells.push_back({{"l", lm.first}, {"m", lm.second}, {"mean_rho", mean}});
    if (mean > 0.0) {
      points.emplace_back(dist, std::log2(mean));
      (lm.first >= lm.second ? upper : lower).emplace_back(dist, std::log2(mean));
    } else {
      rep.warn("rho = 0 at l=" + std::to_string(lm.first) + " m=" + std::to_string(lm.second) + "; left out of the fit");
    }
  }
  const LineFit fit = fit_line(points);
  const double delta = -fit.slope;
  // The two sides of the diagonal have different constants; their separate slopes are diagnostics only.
  const LineFit fit_upper = fit_line(upper);
  const LineFit fit_lower = fit_line(lower);
  rep.aggregates = {{"cells", cells}, {"slope", fit.slope}, {"intercept", fit.intercept}, {"residual", fit.residual},
                    {"delta_hat", delta}, {"dyadic_base", scheme.base},
                    {"slope_l_ge_m", fit_upper.slope}, {"residual_l_ge_m", fit_upper.residual},
                    {"slope_l_lt_m", fit_lower.slope}, {"residual_l_lt_m", fit_lower.residual}};
  out.tables.push_back({"decay", "abs_l_minus_m", "log2_rho", points});
  rep.check("positive_decay", points.size() >= 2 && delta > 0.0,
            "fitted slope " + format_number(fit.slope) + ", residual " + format_number(fit.residual));
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const RunContext& ctx) {
  switch (cfg.id) {
    case ExperimentId::enumerate: return run_enumerate(cfg, ctx);
    case ExperimentId::count: return run_count(cfg, ctx);
    case ExperimentId::scaling: return run_scaling(cfg, ctx);
    case ExperimentId::multiplier_check: return run_prop_square_multiplier(cfg, ctx);
    case ExperimentId::variation: return run_theorem_variation(cfg, ctx);
    case ExperimentId::jump: return run_jump_theorem(cfg, ctx);
    case ExperimentId::local_sup: return run_local_sup(cfg, ctx);
    case ExperimentId::decay: return run_lemma_decay(cfg, ctx);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace simplexvar
