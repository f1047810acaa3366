#include <algorithm>
#include <cmath>
#include <numbers>

#include "carnot/bv_functionals.hpp"
#include "harness/suite_common.hpp"

namespace carnot {

using namespace harness;

namespace {

struct IdentityPlan {
  GridSpec grid;
  double tolerance = 1e-3;
  bool positivity_filter = true;
};

struct HalfHeatPlan {
  RegionSpec region = RegionSpec::ball({0, 0, 0}, 1.0);
  std::vector<double> ts;
  int degree = 2;
  int base_cells = 128;
  HeatRuleParams rule{};
  SurfaceParams surface{};
  PhiParams phi{};
  int phi_table = 16;
  double tolerance = 0.05;
  std::optional<IdentityPlan> identity;
};

struct BoundPlan {
  std::vector<RegionSpec> regions;
  std::vector<double> ts;
  SubstitutionParams substitution{};
  SurfaceParams surface{};
  KernelBoxParams c_G_box{};
};

struct BlowupPlan {
  RegionSpec region = RegionSpec::ball({0, 0, 0}, 1.0);
  std::vector<double> point;
  std::vector<double> radii;
  BlowupParams params{};
  std::optional<std::pair<RegionSpec, std::vector<double>>> halfspace;
};

struct PerimeterPlan {
  Common common;
  std::optional<HalfHeatPlan> half_heat;
  std::optional<BoundPlan> bound;
  std::optional<BlowupPlan> blowup;
};

std::vector<double> read_point(const Node& n, const char* key, int dim) {
  auto p = n.numbers(key);
  if (static_cast<int>(p.size()) != dim) fail(n.child(key), "dimension mismatch");
  return p;
}

PerimeterPlan read_plan(const ExperimentConfig& config) {
  PerimeterPlan p;
  p.common = read_common(config, "perimeter", {"half_heat", "bound", "blowup"});
  const int n = p.common.group.dim();
  const auto& d = config.doc;
  if (d.contains("half_heat")) {
    Node s(d["half_heat"], "half_heat",
           {"region", "t_grid", "degree", "base_cells", "rule", "surface", "phi", "phi_table",
            "tolerance", "identity"});
    HalfHeatPlan q;
    q.region = read_region(s.raw("region"), s.child("region"), n);
    if (!q.region.bounded()) fail(s.child("region"), "must be bounded");
    q.ts = read_t_grid(s.raw("t_grid"), s.child("t_grid"));
    q.degree = static_cast<int>(s.integer("degree", q.degree));
    q.base_cells = static_cast<int>(s.integer("base_cells", q.base_cells));
    if (s.has("rule")) q.rule = read_rule(s.raw("rule"), s.child("rule"));
    if (s.has("surface")) q.surface = read_surface(s.raw("surface"), s.child("surface"));
    if (s.has("phi")) q.phi = read_phi(s.raw("phi"), s.child("phi"));
    q.phi_table = static_cast<int>(s.integer("phi_table", q.phi_table));
    if (q.phi_table < 1) fail(s.child("phi_table"), "at least 1");
    q.tolerance = s.number("tolerance", q.tolerance);
    if (s.has("identity")) {
      Node i = s.table("identity", {"grid", "tolerance", "positivity_filter"});
      IdentityPlan ip;
      ip.grid = read_grid(i.raw("grid"), i.child("grid"), n);
      ip.tolerance = i.number("tolerance", ip.tolerance);
      ip.positivity_filter = i.boolean("positivity_filter", ip.positivity_filter);
      q.identity = ip;
    }
    p.half_heat = q;
  }
  if (d.contains("bound")) {
    Node s(d["bound"], "bound", {"regions", "t_grid", "base_cells", "rule", "surface", "c_G_box"});
    BoundPlan q;
    const auto rs = s.list("regions");
    for (std::size_t k = 0; k < rs.size(); ++k) {
      q.regions.push_back(read_region(*rs[k], "bound.regions[" + std::to_string(k) + "]", n));
      if (!q.regions.back().bounded()) fail("bound.regions", "regions must be bounded");
    }
    if (q.regions.empty()) fail(s.child("regions"), "at least one region");
    q.ts = read_t_grid(s.raw("t_grid"), s.child("t_grid"));
    q.substitution.base_cells = static_cast<int>(s.integer("base_cells", 96));
    if (s.has("rule")) q.substitution.rule = read_rule(s.raw("rule"), s.child("rule"));
    if (s.has("surface")) q.surface = read_surface(s.raw("surface"), s.child("surface"));
    if (s.has("c_G_box")) q.c_G_box = read_box(s.raw("c_G_box"), s.child("c_G_box"));
    p.bound = q;
  }
  if (d.contains("blowup")) {
    Node s(d["blowup"], "blowup", {"region", "point", "radii", "window", "base_cells", "halfspace"});
    BlowupPlan q;
    q.region = read_region(s.raw("region"), s.child("region"), n);
    q.point = read_point(s, "point", n);
    q.radii = s.numbers("radii");
    if (q.radii.size() < 2) fail(s.child("radii"), "at least two radii");
    for (std::size_t k = 0; k < q.radii.size(); ++k)
      if (!(q.radii[k] > 0.0) || (k > 0 && !(q.radii[k] < q.radii[k - 1])))
        fail(s.child("radii"), "radii must be positive and strictly decreasing");
    q.params.window = s.number("window", q.params.window);
    q.params.base_cells = static_cast<int>(s.integer("base_cells", q.params.base_cells));
    if (s.has("halfspace")) {
      Node h = s.table("halfspace", {"nu", "point"});
      q.halfspace = {RegionSpec::vertical_halfspace(h.numbers("nu"), n), read_point(h, "point", n)};
    }
    p.blowup = q;
  }
  return p;
}

// phi_G as a function of the horizontal normal. For q = 2 it depends on the angle
// mod pi only; a periodic linear interpolant over `table` angles is used.
std::function<double(std::span<const double>)> phi_weight(const KernelEngine& engine,
                                                          const PhiParams& p, int table) {
  const int q = engine.group().horizontal_dim();
  if (q != 2) {
    return [&engine, p](std::span<const double> nu) { return phi_G(nu, engine, p); };
  }
  std::vector<double> vals(table);
  for (int k = 0; k < table; ++k) {
    const double a = std::numbers::pi * k / table;
    const double nu[2] = {std::cos(a), std::sin(a)};
    vals[k] = phi_G(nu, engine, p);
  }
  return [vals, table](std::span<const double> nu) {
    double a = std::atan2(nu[1], nu[0]);
    a = std::fmod(a + 2.0 * std::numbers::pi, std::numbers::pi);
    const double s = a / std::numbers::pi * table;
    const int k = static_cast<int>(s) % table;
    const double w = s - std::floor(s);
    return (1.0 - w) * vals[k] + w * vals[(k + 1) % table];
  };
}

}  // namespace

RunReport run_perimeter_sweep(const ExperimentConfig& config) {
  const Stopwatch clock;
  const PerimeterPlan plan = read_plan(config);
  const GroupSpec& g = plan.common.group;
  const KernelEngine engine = make_engine(g, plan.common.engine, plan.common.seed);
  RunReport r = start_report("perimeter", config);
  r.engine = engine.describe();
  if (const auto* mc = engine.mc_params()) r.samples += mc->samples;

  if (plan.half_heat) {
    const auto& p = *plan.half_heat;
    const auto weight = phi_weight(engine, p.phi, p.phi_table);
    const double target = perimeter_weighted(p.region, g, weight, p.surface);
    const HeatRule rule = heat_rule(engine, p.rule);
    std::vector<double> vs, comp, errs, sub_gap;
    for (double t : p.ts) {
      const HalfHeatValue v = half_heat_functional(p.region, t, engine, rule, p.base_cells);
      vs.push_back(v.value);
      comp.push_back(v.complement);
      errs.push_back(0.5 * std::abs(v.value - v.complement) + v.tail);
      sub_gap.push_back(rel(v.value, v.symmetric));
    }
    const VariationReport vr = make_variation_report(p.ts, vs, errs, target, p.degree);
    const std::string name = "half_heat";
    std::vector<double> ratio;
    for (double v : vs) ratio.push_back(v / target);
    r.tables.push_back(sweep_table(name, p.ts,
                                   {{"value", vs}, {"complement", comp}, {"error", errs},
                                    {"ratio", ratio}, {"identity_gap_substitution", sub_gap}}));
    r.tables.push_back({"half_heat.constants",
                        {"target", "perimeter", "rule_nodes", "rule_mass"},
                        {{target, perimeter_smooth(p.region, g, p.surface),
                          static_cast<double>(rule.size()), rule.mass}}});
    r.limits.push_back({name, vr.limit.limit, vr.limit.error, vr.limit.degree, target});
    const double err_max = *std::max_element(errs.begin(), errs.end());
    r.checks.push_back(Check::make("half_heat.limit", rel(vr.limit.limit, target),
                                   (vr.limit.error + err_max) / target, p.tolerance, Relation::AtMost,
                                   describe(p.region) + ": limit " + fmt(vr.limit.limit) +
                                       " vs int phi_G |v| " + fmt(target)));
    if (p.identity) {
      const auto& ip = *p.identity;
      const RegionSpec& E = p.region;
      const GridFunction chi = GridFunction::sample(
          ip.grid, [&E](std::span<const double> x) { return E.contains(x) ? 1.0 : 0.0; });
      ConvolutionOptions opt;
      opt.positivity_filter = ip.positivity_filter;
      std::vector<double> gap, gerr, gv, gs;
      std::size_t worst = 0;
      for (double t : p.ts) {
        const HalfHeatValue v = half_heat_grid(chi, t, engine, opt);
        gv.push_back(v.value);
        gs.push_back(v.symmetric);
        gap.push_back(rel(v.value, v.symmetric));
        gerr.push_back(v.tail / v.symmetric);
        if (gap.back() + gerr.back() > gap[worst] + gerr[worst]) worst = gap.size() - 1;
      }
      r.tables.push_back(sweep_table("identity", p.ts,
                                     {{"one_sided", gv}, {"symmetric", gs}, {"gap", gap}, {"error", gerr}}));
      r.checks.push_back(Check::make("identity", gap[worst], gerr[worst], ip.tolerance,
                                     Relation::AtMost,
                                     "worst t = " + fmt(p.ts[worst]) +
                                         ": int_{E^c} W_t chi_E vs half of int |W_t chi_E - chi_E|"));
    }
  }

  if (plan.bound) {
    const auto& p = *plan.bound;
    const double cG = c_G(engine, p.c_G_box);
    r.tables.push_back({"c_G", {"c_G"}, {{cG}}});
    for (std::size_t k = 0; k < p.regions.size(); ++k) {
      const RegionSpec& E = p.regions[k];
      const PerimeterBoundReport m = perimeter_bound_check(E, p.ts, engine, cG, p.substitution, p.surface);
      const std::string name = "bound." + std::to_string(k);
      r.tables.push_back(sweep_table(name, m.ts,
                                     {{"lhs", m.lhs}, {"error", m.errors}, {"ratio", m.ratio},
                                      {"slack", m.slack}}));
      std::size_t worst = 0;
      for (std::size_t i = 1; i < m.ts.size(); ++i)
        if (m.lhs[i] + m.errors[i] > m.lhs[worst] + m.errors[worst]) worst = i;
      const double bound = cG * m.perimeter;
      r.checks.push_back(Check::make(name, m.lhs[worst] / bound, m.errors[worst] / bound, 1.0,
                                     Relation::AtMost,
                                     describe(E) + ": max lhs / (c_G P) over the t-grid, slack " +
                                         fmt(m.slack[worst], 4) + " at t = " + fmt(m.ts[worst])));
    }
  }

  if (plan.blowup) {
    const auto& p = *plan.blowup;
    BlowupParams coarse = p.params;
    coarse.base_cells = std::max(8, p.params.base_cells / 2);
    std::vector<double> ds, es;
    std::vector<double> nu;
    for (double rad : p.radii) {
      const BlowupValue v = blowup_distance(p.region, p.point, rad, g, p.params);
      const BlowupValue c = blowup_distance(p.region, p.point, rad, g, coarse);
      ds.push_back(v.distance);
      es.push_back(std::abs(v.distance - c.distance));
      nu = v.nu;
    }
    Table tab{"blowup", {"r", "distance", "error"}, {}};
    for (std::size_t k = 0; k < ds.size(); ++k) tab.rows.push_back({p.radii[k], ds[k], es[k]});
    r.tables.push_back(std::move(tab));
    double worst = -1e300, werr = 0.0;
    for (std::size_t k = 1; k < ds.size(); ++k) {
      const double step = ds[k] - ds[k - 1];
      if (step + es[k] + es[k - 1] > worst + werr) {
        worst = step;
        werr = es[k] + es[k - 1];
      }
    }
    std::string nus;
    for (double v : nu) nus += (nus.empty() ? "" : ",") + fmt(v, 4);
    r.checks.push_back(Check::make("blowup.decreasing", worst, werr, 0.0, Relation::Below,
                                   "largest d(r_{k+1}) - d(r_k); nu = (" + nus + ")"));
    if (p.halfspace) {
      const auto& [H, x0] = *p.halfspace;
      double d = 0.0;
      for (double rad : p.radii) d = std::max(d, blowup_distance(H, x0, rad, g, p.params).distance);
      r.checks.push_back(Check::make("blowup.halfspace", d, 0.0, 0.0, Relation::Equal,
                                     describe(H) + " is its own blow-up at every radius"));
    }
  }

  r.wall_seconds = clock.seconds();
  return r;
}

}  // namespace carnot
