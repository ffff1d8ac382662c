#include "simplexvar/report.hpp"

#include <chrono>
#include <charconv>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace simplexvar {

namespace {

// Writes through a temporary so a crashed run never leaves half a file.
void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

bool Report::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

void Report::check(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, std::move(detail)});
}

void Report::warn(std::string message) { warnings.push_back(std::move(message)); }

Json Report::to_json(bool stable) const {
  Json doc;
  doc["schema"] = kReportSchema;
  doc["id"] = id;
  doc["config"] = config;
  doc["trials"] = trials;
  doc["aggregates"] = aggregates;
  Json cs = Json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  doc["checks"] = cs;
  doc["passed"] = passed();
  doc["warnings"] = warnings;
  Json prov = provenance;
  prov["version"] = kVersion;
  prov["stable"] = stable;
  if (!stable) prov["timestamp"] = utc_now();
  doc["provenance"] = prov;
  return doc;
}

std::vector<std::string> validate_report(const Json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) return {"report is not an object"};
  auto need = [&](const char* key, auto pred, const char* what) {
    if (!doc.contains(key)) {
      errors.push_back(std::string("missing ") + key);
    } else if (!pred(doc[key])) {
      errors.push_back(std::string(key) + " is not " + what);
    }
  };
  need("schema", [](const Json& j) { return j.is_string() && j.get<std::string>() == kReportSchema; }, "the current schema tag");
  need("id", [](const Json& j) { return j.is_string() && !j.get<std::string>().empty(); }, "a non-empty string");
  need("config", [](const Json& j) { return j.is_object(); }, "an object");
  need("trials", [](const Json& j) { return j.is_array(); }, "an array");
  need("aggregates", [](const Json& j) { return j.is_object(); }, "an object");
  need("passed", [](const Json& j) { return j.is_boolean(); }, "a boolean");
  need("warnings", [](const Json& j) { return j.is_array(); }, "an array");
  need("provenance", [](const Json& j) { return j.is_object() && j.contains("version"); }, "an object with a version");
  need("checks", [](const Json& j) { return j.is_array(); }, "an array");
  if (errors.empty()) {
    bool all = true;
    for (const auto& c : doc["checks"]) {
      if (!c.is_object() || !c.contains("name") || !c.contains("passed") || !c["passed"].is_boolean()) {
        errors.push_back("malformed check entry");
        break;
      }
      all = all && c["passed"].get<bool>();
    }
    if (errors.empty() && all != doc["passed"].get<bool>()) errors.push_back("passed disagrees with checks");
  }
  return errors;
}

void write_report(const std::filesystem::path& path, const Report& report, bool stable) {
  write_atomic(path, report.to_json(stable).dump(2) + "\n");
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::string& x_name, const std::string& y_name,
               const std::vector<std::pair<double, double>>& rows) {
  std::string text = x_name + "," + y_name + "\n";
  for (const auto& [x, y] : rows) text += format_number(x) + "," + format_number(y) + "\n";
  write_atomic(path, text);
}

}  // namespace simplexvar
