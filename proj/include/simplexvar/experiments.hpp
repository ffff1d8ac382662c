#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "simplexvar/copyset_io.hpp"
#include "simplexvar/lattice_geometry.hpp"
#include "simplexvar/report.hpp"

namespace simplexvar {

enum class ExperimentId { enumerate, count, scaling, multiplier_check, variation, jump, local_sup, decay };

std::string to_string(ExperimentId id);
// ConfigError for unknown names.
ExperimentId parse_experiment_id(const std::string& name);

struct SimplexSpec {
  int n = 5;
  std::vector<IntVec> vertices = {{1, 0, 0, 0, 0}};

  SimplexConfig build() const;  // ConfigError if degenerate
};

/// Resolved settings for one experiment: built-in defaults, then the
/// config's top-level keys, then its per-experiment section.
struct ExperimentConfig {
  ExperimentId id = ExperimentId::scaling;
  SimplexSpec simplex;
  int grid = 16;
  int trials = 4;
  std::uint64_t seed = 1;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path output_dir = "reports";
  bool regime_override = false;
  std::string generator = "gaussian-iid";  // trial functions for variation, jump, decay
  int box_side = 1;

  // enumerate / scaling
  std::vector<std::int64_t> lambda_sq;  // enumerate
  std::vector<std::int64_t> lambdas = {2, 4, 8, 16};
  double band = 8.0;

  // count
  int count_n = 4;
  std::int64_t m_max = 200;

  // multiplier-check
  std::vector<SimplexSpec> simplices;  // defaults to {simplex}
  std::vector<int> bands_j = {1, 2};
  int l_span = 16;
  int l_extend = 8;
  int frequencies = 2048;
  double stability_tolerance = 0.01;
  double uniformity_factor = 4.0;

  // variation / jump
  std::vector<std::int64_t> scales = {1, 2};
  std::vector<std::int64_t> extended_scales = {1, 2, 4};
  std::vector<double> r_list = {3.0};
  std::vector<double> lam_grid = {0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
  double growth_limit = 0.25;

  // local-sup
  int level = 2;
  int stride = 1;

  // decay
  std::vector<int> levels_l = {0, 1, 2, 3};
  std::vector<int> levels_m = {1, 2, 3};

  Json to_json() const;
};

// Throws ConfigError on malformed or inconsistent input.
ExperimentConfig resolve_config(const Json& doc, ExperimentId id);
Json load_config_file(const std::filesystem::path& path);

struct RunContext {
  CopySetCache* cache = nullptr;                      // optional
  std::function<void(const std::string&)> log;        // optional, stderr in the CLI
};

struct ExperimentOutput {
  Report report;
  // One two-column table per figure: file stem -> (x name, y name, rows).
  struct Table {
    std::string stem;
    std::string x_name;
    std::string y_name;
    std::vector<std::pair<double, double>> rows;
  };
  std::vector<Table> tables;
};

ExperimentOutput run_enumerate(const ExperimentConfig& cfg, const RunContext& ctx = {});
ExperimentOutput run_count(const ExperimentConfig& cfg, const RunContext& ctx = {});
ExperimentOutput run_scaling(const ExperimentConfig& cfg, const RunContext& ctx = {});
ExperimentOutput run_prop_square_multiplier(const ExperimentConfig& cfg, const RunContext& ctx = {});
ExperimentOutput run_theorem_variation(const ExperimentConfig& cfg, const RunContext& ctx = {});
ExperimentOutput run_jump_theorem(const ExperimentConfig& cfg, const RunContext& ctx = {});
ExperimentOutput run_local_sup(const ExperimentConfig& cfg, const RunContext& ctx = {});
ExperimentOutput run_lemma_decay(const ExperimentConfig& cfg, const RunContext& ctx = {});

// Reasons the local-sup configuration cannot be measured; empty when feasible.
std::vector<std::string> local_sup_infeasibility(const ExperimentConfig& cfg);

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const RunContext& ctx = {});

/// Least-squares line y = slope * x + intercept with the RMS residual.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};
LineFit fit_line(const std::vector<std::pair<double, double>>& points);

}  // namespace simplexvar
