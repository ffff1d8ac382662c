#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace simplexvar {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "simplexvar.report/1";
inline constexpr const char* kVersion = "0.3.0";

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// An experiment's output. Aggregates must be recomputable from `trials`.
struct Report {
  std::string id;
  Json config = Json::object();
  Json trials = Json::array();
  Json aggregates = Json::object();
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  Json provenance = Json::object();

  bool passed() const;
  void check(std::string name, bool ok, std::string detail = {});
  void warn(std::string message);

  // Timestamps are left out when `stable` is set so reruns compare byte for byte.
  Json to_json(bool stable) const;
};

// Problems found in a report document; empty when it conforms.
std::vector<std::string> validate_report(const Json& doc);

void write_report(const std::filesystem::path& path, const Report& report, bool stable);

// Two-column CSV with a header row, '.' decimals, '\n' line endings.
void write_csv(const std::filesystem::path& path, const std::string& x_name, const std::string& y_name,
               const std::vector<std::pair<double, double>>& rows);

// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace simplexvar
