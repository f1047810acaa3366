#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace carnot {

// Parsed experiment file plus command-line overrides. The document is kept
// verbatim; each suite validates the sections it reads before computing.
struct ExperimentConfig {
  nlohmann::json doc;
  // --seed wins over the "seed" key
  std::optional<std::uint64_t> seed;
  std::string source;

  static ExperimentConfig from_json(nlohmann::json doc, std::string source = "<memory>");
  // Throws ConfigError on unreadable or malformed files.
  static ExperimentConfig load(const std::string& path);
  // "suite" key, or empty
  std::string suite() const;
  std::optional<std::uint64_t> effective_seed() const;
};

enum class Relation { AtMost, Below, AtLeast, Equal };

struct Check {
  std::string name;
  double value = 0.0;
  double error = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::AtMost;
  bool passed = false;
  std::string detail;

  // AtMost passes iff value + error <= threshold, Below iff value + error < threshold,
  // AtLeast iff value - error >= threshold, Equal iff value == threshold and error == 0.
  static Check make(std::string name, double value, double error, double threshold,
                    Relation rel, std::string detail = {});
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct LimitEstimate {
  std::string name;
  double limit = 0.0;
  double error = 0.0;
  int degree = 0;
  double reference = 0.0;
};

struct RunReport {
  std::string suite;
  nlohmann::json config;
  std::string engine;
  std::vector<Check> checks;
  std::vector<LimitEstimate> limits;
  std::vector<Table> tables;
  double wall_seconds = 0.0;
  std::uint64_t samples = 0;

  bool passed() const;
  nlohmann::json to_json() const;
  // Long format: record,name,row,field,value
  void write_csv(std::ostream& os) const;
};

RunReport run_kernel_suite(const ExperimentConfig& config);
RunReport run_variation_sweep(const ExperimentConfig& config);
RunReport run_perimeter_sweep(const ExperimentConfig& config);
RunReport run_commutator_suite(const ExperimentConfig& config);
RunReport run_coarea_check(const ExperimentConfig& config);

// Dispatch on a suite name: kernel, variation, perimeter, commutator, coarea.
RunReport run_suite(const std::string& suite, const ExperimentConfig& config);

}  // namespace carnot
