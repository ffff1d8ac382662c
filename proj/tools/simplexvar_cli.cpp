// Command-line front end: one subcommand per experiment plus `report`.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simplexvar/copyset_io.hpp"
#include "simplexvar/errors.hpp"
#include "simplexvar/experiments.hpp"

namespace sv = simplexvar;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheck = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

int fail(const std::string& kind, const std::string& msg, int code) {
  std::cerr << "simplexvar:error:" << kind << ": " << msg << "\n";
  return code;
}

struct Options {
  std::string config;
  std::string output_dir;
  std::string cache_dir;
  bool stable = false;
  bool quiet = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> grid;
  // count / enumerate
  std::optional<int> n;
  std::optional<std::int64_t> m_max;
  std::vector<std::int64_t> lambda_sq;
  std::vector<std::string> report_files;
};

sv::Json build_document(const Options& opt, sv::ExperimentId id) {
  sv::Json doc = opt.config.empty() ? sv::Json::object() : sv::load_config_file(opt.config);
  if (!doc.is_object()) throw sv::ConfigError("config root must be an object");
  if (!opt.output_dir.empty()) doc["output_dir"] = opt.output_dir;
  if (!opt.cache_dir.empty()) doc["cache_dir"] = opt.cache_dir;
  sv::Json& sec = doc["experiments"][sv::to_string(id)];
  if (sec.is_null()) sec = sv::Json::object();
  if (opt.seed) sec["seed"] = *opt.seed;
  if (opt.trials) sec["trials"] = *opt.trials;
  if (opt.grid) sec["grid"] = *opt.grid;
  if (opt.n) sec["n"] = *opt.n;
  if (opt.m_max) sec["m_max"] = *opt.m_max;
  if (!opt.lambda_sq.empty()) sec["lambda_sq"] = opt.lambda_sq;
  return doc;
}

int run(const Options& opt, sv::ExperimentId id) {
  sv::ExperimentConfig cfg;
  try {
    cfg = sv::resolve_config(build_document(opt, id), id);
  } catch (const sv::ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  }
  auto log = [&](const std::string& m) {
    if (!opt.quiet) std::cerr << "simplexvar: " << m << "\n";
  };
  sv::CopySetCache cache(sv::CopySetCache::resolve_dir(cfg.cache_dir), log);
  sv::RunContext ctx{&cache, log};
  sv::ExperimentOutput out;
  try {
    out = sv::run_experiment(cfg, ctx);
  } catch (const sv::ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const sv::UsageError& e) {
    return fail("usage", e.what(), kExitConfig);
  } catch (const sv::EmptyCopySet& e) {
    return fail("empty-copy-set", e.what(), kExitConfig);
  } catch (const sv::CapacityError& e) {
    return fail("capacity", e.what(), kExitConfig);
  }
  // cache traffic depends on what earlier runs left behind, like the timestamp
  if (!opt.stable) {
    out.report.provenance["cache"] = {{"hits", cache.hits()}, {"misses", cache.misses()}, {"rejected", cache.rejected()}};
  }
  std::filesystem::create_directories(cfg.output_dir);
  const auto report_path = cfg.output_dir / (sv::to_string(id) + ".json");
  sv::write_report(report_path, out.report, opt.stable);
  for (const auto& t : out.tables) sv::write_csv(cfg.output_dir / (t.stem + ".csv"), t.x_name, t.y_name, t.rows);
  for (const auto& w : out.report.warnings) log("warning: " + w);
  for (const auto& c : out.report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << sv::to_string(id) << "." << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
  }
  std::cout << "report: " << report_path.string() << "\n";
  if (!out.report.passed()) return fail("check", "one or more checks failed", kExitCheck);
  return kExitPass;
}

// Validates report files; exit 2 on schema problems, 1 if any report failed its checks.
int report_command(const Options& opt) {
  if (opt.report_files.empty()) return fail("usage", "report needs at least one file", kExitConfig);
  int code = kExitPass;
  for (const auto& path : opt.report_files) {
    sv::Json doc;
    try {
      doc = sv::load_config_file(path);
    } catch (const sv::ConfigError& e) {
      code = kExitConfig;
      fail("schema", e.what(), kExitConfig);
      continue;
    }
    const auto problems = sv::validate_report(doc);
    if (!problems.empty()) {
      for (const auto& p : problems) fail("schema", path + ": " + p, kExitConfig);
      code = kExitConfig;
      continue;
    }
    const bool passed = doc["passed"].get<bool>();
    std::cout << path << ": " << doc["id"].get<std::string>() << " " << (passed ? "passed" : "failed") << ", "
              << doc["checks"].size() << " checks, " << doc["warnings"].size() << " warnings\n";
    if (!passed && code == kExitPass) code = kExitCheck;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice simplex averages: enumeration, multipliers, variation and jump experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sv::kVersion));
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", opt.output_dir, "directory for reports and CSV tables");
    sub->add_option("--cache-dir", opt.cache_dir, "copy-set cache (SIMPLEXVAR_CACHE_DIR wins)");
    sub->add_flag("--stable", opt.stable, "omit timestamps so reruns are byte-identical");
    sub->add_flag("-q,--quiet", opt.quiet, "no progress or cache messages");
    sub->add_option("--seed", opt.seed);
    sub->add_option("--trials", opt.trials);
    sub->add_option("--grid", opt.grid, "grid period N");
  };

  std::vector<std::pair<CLI::App*, sv::ExperimentId>> subs;
  const std::vector<std::pair<sv::ExperimentId, std::string>> listing = {
      {sv::ExperimentId::enumerate, "enumerate isometric copies of the simplex at given lambda^2"},
      {sv::ExperimentId::count, "tabulate r_n(m) for m <= m_max"},
      {sv::ExperimentId::scaling, "normalized copy counts over a list of dilations"},
      {sv::ExperimentId::multiplier_check, "square sums of the multiplier scale increments"},
      {sv::ExperimentId::variation, "r-variation of the averages over a scale list"},
      {sv::ExperimentId::jump, "lam-jump counts against the square function"},
      {sv::ExperimentId::decay, "smoothed averages versus conditional expectations of D_m f"},
      {sv::ExperimentId::local_sup, "local sup of averages for band-limited inputs"},
  };
  for (const auto& [id, help] : listing) {
    auto* sub = app.add_subcommand(sv::to_string(id), help);
    common(sub);
    if (id == sv::ExperimentId::count) {
      sub->add_option("--n", opt.n, "dimension");
      sub->add_option("--m-max", opt.m_max, "largest m");
    }
    if (id == sv::ExperimentId::enumerate) sub->add_option("--lambda-sq", opt.lambda_sq, "squared dilations");
    subs.emplace_back(sub, id);
  }
  auto* report = app.add_subcommand("report", "validate report files and summarize them");
  report->add_option("files", opt.report_files, "report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config", e.what(), kExitConfig);
  }

  try {
    if (report->parsed()) return report_command(opt);
    for (const auto& [sub, id] : subs) {
      if (sub->parsed()) return run(opt, id);
    }
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitInternal);
  }
  return fail("usage", "no subcommand", kExitConfig);
}
