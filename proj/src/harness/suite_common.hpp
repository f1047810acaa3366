#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carnot/harness.hpp"
#include "carnot/quadrature.hpp"
#include "harness/config_reader.hpp"

namespace carnot::harness {

// Top-level keys shared by every suite.
struct Common {
  GroupSpec group = GroupSpec::euclidean(1);
  EngineChoice engine{};
  std::optional<std::uint64_t> seed;
};

Common read_common(const ExperimentConfig& config, const std::string& suite,
                   const std::vector<std::string>& sections);

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

RunReport start_report(const std::string& suite, const ExperimentConfig& config);

// Table of t against one or more per-t columns.
Table sweep_table(const std::string& name, const std::vector<double>& ts,
                  const std::vector<std::pair<std::string, std::vector<double>>>& columns);

std::string fmt(double v, int precision = 6);

// Relative |a - b| / |b| (absolute when b = 0).
double rel(double a, double b);

}  // namespace carnot::harness
