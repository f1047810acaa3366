#include "harness/suite_common.hpp"

#include <cmath>
#include <sstream>

#include "carnot/errors.hpp"

namespace carnot::harness {

Common read_common(const ExperimentConfig& config, const std::string& suite,
                   const std::vector<std::string>& sections) {
  std::vector<std::string> allowed{"suite", "description", "group", "engine", "seed", "output"};
  allowed.insert(allowed.end(), sections.begin(), sections.end());
  Node top(config.doc, config.source, allowed);
  const std::string declared = config.suite();
  if (!declared.empty() && declared != suite)
    fail("suite", "config is for '" + declared + "', not '" + suite + "'");
  if (top.has("output")) Node(top.raw("output"), "output", {"dir"});
  Common c;
  c.group = top.has("group") ? read_group(top.raw("group"), "group") : GroupSpec::heisenberg(1);
  if (top.has("engine")) c.engine = read_engine(top.raw("engine"), "engine");
  c.seed = config.effective_seed();
  if (c.engine.kind == "monte_carlo" && !c.seed)
    fail("seed", "required when the monte_carlo engine is selected");
  return c;
}

RunReport start_report(const std::string& suite, const ExperimentConfig& config) {
  RunReport r;
  r.suite = suite;
  r.config = config.doc;
  if (const auto s = config.effective_seed()) r.config["seed"] = *s;
  return r;
}

Table sweep_table(const std::string& name, const std::vector<double>& ts,
                  const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  Table t;
  t.name = name;
  t.columns.push_back("t");
  for (const auto& [c, _] : columns) t.columns.push_back(c);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::vector<double> row{ts[k]};
    for (const auto& [_, v] : columns) row.push_back(k < v.size() ? v[k] : std::nan(""));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double rel(double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b); }

}  // namespace carnot::harness
