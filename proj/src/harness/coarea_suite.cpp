#include <algorithm>
#include <cmath>

#include "carnot/bv_functionals.hpp"
#include "harness/suite_common.hpp"

namespace carnot {

using namespace harness;

namespace {

struct CoareaCase {
  std::string name;
  GroupSpec group = GroupSpec::euclidean(2);
  FunctionSpec function;
  GridSpec grid;
  int tau_nodes = 48;
  SurfaceParams surface{};
  double tolerance = 0.01;
};

struct CoareaPlan {
  Common common;
  std::vector<CoareaCase> cases;
};

CoareaPlan read_plan(const ExperimentConfig& config) {
  CoareaPlan p;
  p.common = read_common(config, "coarea", {"cases"});
  Node top(config.doc, config.source,
           {"suite", "description", "group", "engine", "seed", "output", "cases"});
  const auto cs = top.list("cases");
  if (cs.empty()) fail("cases", "at least one case");
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const std::string path = "cases[" + std::to_string(k) + "]";
    Node s(*cs[k], path, {"name", "group", "function", "grid", "tau_nodes", "surface", "tolerance"});
    CoareaCase c;
    c.group = s.has("group") ? read_group(s.raw("group"), s.child("group")) : p.common.group;
    c.function = read_function(s.raw("function"), s.child("function"), c.group.dim());
    c.name = s.string("name", c.function.name);
    c.grid = read_grid(s.raw("grid"), s.child("grid"), c.group.dim());
    c.tau_nodes = static_cast<int>(s.integer("tau_nodes", c.tau_nodes));
    if (c.tau_nodes < 2) fail(s.child("tau_nodes"), "at least 2");
    if (s.has("surface")) c.surface = read_surface(s.raw("surface"), s.child("surface"));
    c.tolerance = s.number("tolerance", c.tolerance);
    p.cases.push_back(std::move(c));
  }
  return p;
}

GridSpec halved(const GridSpec& g) {
  GridSpec c = g;
  for (int& s : c.shape) s = (s + 1) / 2;
  return c;
}

}  // namespace

RunReport run_coarea_check(const ExperimentConfig& config) {
  const Stopwatch clock;
  const CoareaPlan plan = read_plan(config);
  RunReport r = start_report("coarea", config);
  r.engine = "none";
  Table tab{"coarea", {"case", "gradient_side", "level_side", "gradient_coarse", "level_coarse"}, {}};
  for (std::size_t k = 0; k < plan.cases.size(); ++k) {
    const auto& c = plan.cases[k];
    const ScalarField f = c.function.field();
    const FunctionSpec fs = c.function;
    auto levels = [&fs](double tau) { return fs.level(tau); };
    const CoareaReport fine = coarea_check(f, c.grid, levels, fs.tau_lo(), fs.tau_hi(), c.group,
                                           c.tau_nodes, c.surface);
    const CoareaReport coarse = coarea_check(f, halved(c.grid), levels, fs.tau_lo(), fs.tau_hi(),
                                             c.group, std::max(2, c.tau_nodes / 2), c.surface);
    tab.rows.push_back({double(k), fine.gradient_side, fine.level_side, coarse.gradient_side,
                        coarse.level_side});
    const double err = (std::abs(fine.gradient_side - coarse.gradient_side) +
                        std::abs(fine.level_side - coarse.level_side)) /
                       fine.level_side;
    r.checks.push_back(Check::make("coarea." + c.name, fine.relative_gap, err, c.tolerance,
                                   Relation::AtMost,
                                   c.group.name() + ": int |grad_X f| = " + fmt(fine.gradient_side) +
                                       ", int P_G({f > tau}) = " + fmt(fine.level_side)));
  }
  r.tables.push_back(std::move(tab));
  r.wall_seconds = clock.seconds();
  return r;
}

}  // namespace carnot
