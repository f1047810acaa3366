#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "carnot/errors.hpp"
#include "carnot/harness.hpp"

namespace carnot {

using nlohmann::json;

ExperimentConfig ExperimentConfig::from_json(json doc, std::string source) {
  if (!doc.is_object()) throw ConfigError(source + ": top level must be a table");
  ExperimentConfig c;
  c.doc = std::move(doc);
  c.source = std::move(source);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json doc;
  try {
    // comments allowed, trailing commas not
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return from_json(std::move(doc), path);
}

std::string ExperimentConfig::suite() const {
  if (!doc.contains("suite")) return {};
  if (!doc["suite"].is_string()) throw ConfigError("suite: expected a string");
  return doc["suite"].get<std::string>();
}

std::optional<std::uint64_t> ExperimentConfig::effective_seed() const {
  if (seed) return seed;
  if (!doc.contains("seed")) return std::nullopt;
  const auto& s = doc["seed"];
  if (s.is_number_unsigned()) return s.get<std::uint64_t>();
  if (s.is_number_integer() && s.get<long long>() >= 0)
    return static_cast<std::uint64_t>(s.get<long long>());
  throw ConfigError("seed: expected a non-negative integer");
}

Check Check::make(std::string name, double value, double error, double threshold, Relation rel,
                  std::string detail) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.error = std::abs(error);
  c.threshold = threshold;
  c.relation = rel;
  c.detail = std::move(detail);
  const bool finite = std::isfinite(value) && std::isfinite(c.error);
  switch (rel) {
    case Relation::AtMost:
      c.passed = finite && value + c.error <= threshold;
      break;
    case Relation::Below:
      c.passed = finite && value + c.error < threshold;
      break;
    case Relation::AtLeast:
      c.passed = finite && value - c.error >= threshold;
      break;
    case Relation::Equal:
      c.passed = finite && value == threshold && c.error == 0.0;
      break;
  }
  return c;
}

bool RunReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

namespace {

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::AtMost:
      return "<=";
    case Relation::Below:
      return "<";
    case Relation::AtLeast:
      return ">=";
    case Relation::Equal:
      return "==";
  }
  return "?";
}

// JSON has no infinity
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

json RunReport::to_json() const {
  json j;
  j["suite"] = suite;
  j["config"] = config;
  j["engine"] = engine;
  j["passed"] = passed();
  j["wall_seconds"] = wall_seconds;
  j["samples"] = samples;
  j["checks"] = json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"value", number(c.value)},
                           {"error", number(c.error)},
                           {"threshold", number(c.threshold)},
                           {"relation", relation_name(c.relation)},
                           {"passed", c.passed},
                           {"detail", c.detail}});
  j["limits"] = json::array();
  for (const auto& l : limits)
    j["limits"].push_back({{"name", l.name},
                           {"limit", number(l.limit)},
                           {"error", number(l.error)},
                           {"degree", l.degree},
                           {"reference", number(l.reference)}});
  j["tables"] = json::array();
  for (const auto& t : tables) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::array();
      for (double v : r) row.push_back(number(v));
      rows.push_back(row);
    }
    j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
  }
  return j;
}

void RunReport::write_csv(std::ostream& os) const {
  os.precision(17);
  os << "record,name,row,field,value\n";
  for (const auto& c : checks) {
    const std::string n = csv_field(c.name);
    os << "check," << n << ",0,value," << c.value << '\n';
    os << "check," << n << ",0,error," << c.error << '\n';
    os << "check," << n << ",0,threshold," << c.threshold << '\n';
    os << "check," << n << ",0,relation," << relation_name(c.relation) << '\n';
    os << "check," << n << ",0,passed," << (c.passed ? 1 : 0) << '\n';
  }
  for (const auto& l : limits) {
    const std::string n = csv_field(l.name);
    os << "limit," << n << ",0,limit," << l.limit << '\n';
    os << "limit," << n << ",0,error," << l.error << '\n';
    os << "limit," << n << ",0,reference," << l.reference << '\n';
  }
  for (const auto& t : tables)
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      for (std::size_t c = 0; c < t.columns.size() && c < t.rows[r].size(); ++c)
        os << "table," << csv_field(t.name) << ',' << r << ',' << csv_field(t.columns[c]) << ','
           << t.rows[r][c] << '\n';
  os << "run," << csv_field(suite) << ",0,wall_seconds," << wall_seconds << '\n';
  os << "run," << csv_field(suite) << ",0,samples," << samples << '\n';
}

RunReport run_suite(const std::string& suite, const ExperimentConfig& config) {
  const std::string declared = config.suite();
  if (!declared.empty() && declared != suite)
    throw ConfigError("config declares suite '" + declared + "' but '" + suite + "' was requested");
  if (suite == "kernel") return run_kernel_suite(config);
  if (suite == "variation") return run_variation_sweep(config);
  if (suite == "perimeter") return run_perimeter_sweep(config);
  if (suite == "commutator") return run_commutator_suite(config);
  if (suite == "coarea") return run_coarea_check(config);
  throw ConfigError("unknown suite '" + suite + "'");
}

}  // namespace carnot
