#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "carnot/commutator.hpp"
#include "carnot/kernel_quadrature.hpp"
#include "harness/suite_common.hpp"

namespace carnot {

using namespace harness;

namespace {

struct ReconstructionPlan {
  int points = 24;
  double radius = 2.0;
  double t = 1.0;
  double step = 1e-3;
  double tolerance = 1e-6;
};

struct PropertiesPlan {
  std::vector<CommutatorKernel> kernels;
  std::vector<double> ts{0.25, 1.0, 4.0};
  GPropertyParams params{};
  std::optional<ReconstructionPlan> reconstruction;
};

struct ResidualPlan {
  FunctionSpec function;
  double t = 0.1;
  std::vector<GridSpec> grids;
  double tolerance = 1e-2;
  double min_decrease = 2.0;
  std::vector<double> mu_bound_ts;
  KernelBoxParams abs_G_box{9.0, 20.0, 49, 97};
  // error bar: change of the residual when the box grows by this many cells per side
  int margin_cells = 2;
};

struct CommutatorPlan {
  Common common;
  std::optional<PropertiesPlan> properties;
  std::optional<ResidualPlan> residual;
};

std::vector<CommutatorKernel> all_kernels(const GroupSpec& g) {
  std::vector<CommutatorKernel> out;
  for (int i = 0; i < g.horizontal_dim(); ++i)
    for (int j = 0; j < g.horizontal_dim(); ++j) out.push_back({i, j});
  return out;
}

CommutatorPlan read_plan(const ExperimentConfig& config) {
  CommutatorPlan p;
  p.common = read_common(config, "commutator", {"properties", "residual"});
  const GroupSpec& g = p.common.group;
  if (g.is_abelian()) fail("group", "commutator kernels need a non-abelian group");
  const int n = g.dim(), q = g.horizontal_dim();
  const auto& d = config.doc;
  if (d.contains("properties")) {
    Node s(d["properties"], "properties",
           {"kernels", "ts", "box", "tail_radius", "tolerance", "tail_tolerance", "reconstruction"});
    PropertiesPlan pp;
    if (s.has("kernels")) {
      for (const auto& ij : s.matrix("kernels")) {
        if (ij.size() != 2 || ij[0] < 0 || ij[0] >= q || ij[1] < 0 || ij[1] >= q)
          fail(s.child("kernels"), "expected [i, j] pairs of first-layer indices");
        pp.kernels.push_back({static_cast<int>(ij[0]), static_cast<int>(ij[1])});
      }
    } else {
      pp.kernels = all_kernels(g);
    }
    if (s.has("ts")) pp.ts = s.numbers("ts");
    if (std::find(pp.ts.begin(), pp.ts.end(), 1.0) == pp.ts.end())
      fail(s.child("ts"), "must contain t = 1 (the tail is measured there)");
    for (double t : pp.ts)
      if (!(t > 0.0)) fail(s.child("ts"), "times must be positive");
    if (s.has("box")) pp.params.box = read_box(s.raw("box"), s.child("box"));
    pp.params.tail_radius = s.number("tail_radius", pp.params.tail_radius);
    pp.params.tolerance = s.number("tolerance", pp.params.tolerance);
    pp.params.tail_tolerance = s.number("tail_tolerance", pp.params.tail_tolerance);
    if (s.has("reconstruction")) {
      Node rn = s.table("reconstruction", {"points", "radius", "t", "step", "tolerance"});
      ReconstructionPlan rp;
      rp.points = static_cast<int>(rn.integer("points", rp.points));
      rp.radius = rn.number("radius", rp.radius);
      rp.t = rn.number("t", rp.t);
      rp.step = rn.number("step", rp.step);
      rp.tolerance = rn.number("tolerance", rp.tolerance);
      pp.reconstruction = rp;
    }
    p.properties = pp;
  }
  if (d.contains("residual")) {
    Node s(d["residual"], "residual",
           {"function", "t", "grids", "tolerance", "min_decrease", "mu_bound_ts", "abs_G_box",
            "margin_cells"});
    ResidualPlan rp;
    rp.function = read_function(s.raw("function"), s.child("function"), n);
    rp.t = s.number("t", rp.t);
    const auto gs = s.list("grids");
    for (std::size_t k = 0; k < gs.size(); ++k)
      rp.grids.push_back(read_grid(*gs[k], "residual.grids[" + std::to_string(k) + "]", n));
    if (rp.grids.empty()) fail(s.child("grids"), "at least one grid");
    rp.tolerance = s.number("tolerance", rp.tolerance);
    rp.min_decrease = s.number("min_decrease", rp.min_decrease);
    if (s.has("mu_bound_ts")) rp.mu_bound_ts = s.numbers("mu_bound_ts");
    rp.margin_cells = static_cast<int>(s.integer("margin_cells", rp.margin_cells));
    if (rp.margin_cells < 1) fail(s.child("margin_cells"), "at least 1");
    if (s.has("abs_G_box")) rp.abs_G_box = read_box(s.raw("abs_G_box"), s.child("abs_G_box"));
    p.residual = rp;
  }
  return p;
}

double mass_defect(const KernelEngine& engine, double t, const KernelBoxParams& box) {
  const KernelSymbol heat = KernelSymbol::heat();
  const auto v = kernel_box_integrals(
      engine, t, kernel_box(engine.group(), t, box), std::span<const KernelSymbol>(&heat, 1), 1,
      [](std::span<const double>, std::span<const double> g, std::span<double> acc) { acc[0] = g[0]; });
  return std::abs(v[0] - 1.0);
}

GridSpec widened(const GridSpec& g, int cells) {
  GridSpec w = g;
  for (int a = 0; a < g.dim(); ++a) {
    const double h = g.spacing(a);
    w.lo[a] -= cells * h;
    w.hi[a] += cells * h;
    w.shape[a] += 2 * cells;
  }
  return w;
}

double worst_residual(const ScalarField& f, const GridSpec& grid, double t, const KernelEngine& engine,
                      Table* tab) {
  const GridFunction fg = GridFunction::sample(grid, f.value);
  double worst = 0.0;
  for (int i = 0; i < engine.group().horizontal_dim(); ++i) {
    const ResidualReport rr = commutator_residual(i, fg, t, engine);
    if (tab)
      tab->rows.push_back({double(grid.shape[0]), grid.spacing(0), double(i), rr.residual,
                           rr.gradient_l1, rr.mu_l1, rr.tail});
    worst = std::max(worst, rr.residual);
  }
  return worst;
}

}  // namespace

RunReport run_commutator_suite(const ExperimentConfig& config) {
  const Stopwatch clock;
  const CommutatorPlan plan = read_plan(config);
  const GroupSpec& g = plan.common.group;
  const int q = g.horizontal_dim();
  const KernelEngine engine = make_engine(g, plan.common.engine, plan.common.seed);
  RunReport r = start_report("commutator", config);
  r.engine = engine.describe();
  if (const auto* mc = engine.mc_params()) r.samples += mc->samples;
  // operative constant of the L^1 bound on G
  double abs_G = 0.0;

  if (plan.properties) {
    const auto& p = *plan.properties;
    double defect = 0.0, defect_unit = 0.0;
    for (double t : p.ts) {
      const double m = mass_defect(engine, t, p.params.box);
      defect = std::max(defect, m);
      if (t == 1.0) defect_unit = m;
    }
    Table tab{"G_integrals", {"i", "j", "t", "integral", "abs_integral"}, {}};
    Table tails{"G_tail", {"i", "j", "tail_fraction", "radius_for_tolerance"}, {}};
    for (const auto& G : p.kernels) {
      const GPropertyReport rep = check_G_properties(engine, G, p.ts, p.params);
      const std::string name = "G[" + std::to_string(G.i) + "][" + std::to_string(G.j) + "]";
      for (std::size_t k = 0; k < rep.ts.size(); ++k) {
        tab.rows.push_back({double(G.i), double(G.j), rep.ts[k], rep.integral[k], rep.abs_integral[k]});
        if (rep.ts[k] == 1.0) abs_G = std::max(abs_G, rep.abs_integral[k]);
      }
      tails.rows.push_back({double(G.i), double(G.j), rep.tail_fraction, rep.radius_for_tolerance});
      r.checks.push_back(Check::make(name + ".zero_mean", rep.zero_mean, defect, p.params.tolerance,
                                     Relation::AtMost,
                                     "max_t |int G| / int |G|, " + rep.derivative_path + " derivatives"));
      r.checks.push_back(Check::make(name + ".constant", rep.abs_spread, 2.0 * defect,
                                     p.params.tolerance, Relation::AtMost,
                                     "relative spread of int |G(t, .)| over t"));
      r.checks.push_back(Check::make(name + ".tail", rep.tail_fraction, defect_unit,
                                     p.params.tail_tolerance, Relation::AtMost,
                                     "int_{|z| > " + fmt(p.params.tail_radius) +
                                         "} |G(1, .)| / int |G(1, .)|; tolerance reached at |z| = " +
                                         fmt(rep.radius_for_tolerance)));
    }
    r.tables.push_back(std::move(tab));
    r.tables.push_back(std::move(tails));
    r.tables.push_back({"heat_mass_defect", {"max_over_t", "t=1"}, {{defect, defect_unit}}});
    if (p.reconstruction) {
      const auto& rp = *p.reconstruction;
      std::mt19937_64 rng(plan.common.seed.value_or(1));
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<GroupPoint> lattice;
      for (int k = 0; k < rp.points; ++k) {
        GroupPoint z(static_cast<std::size_t>(g.dim()));
        for (int a = 0; a < g.dim(); ++a) z[a] = u(rng) * (a < q ? rp.radius : rp.radius * rp.radius);
        lattice.push_back(std::move(z));
      }
      for (int i = 0; i < q; ++i) {
        const double res = reconstruction_residual(engine, i, rp.t, lattice, rp.step);
        const double res2 = reconstruction_residual(engine, i, rp.t, lattice, 2.0 * rp.step);
        r.checks.push_back(Check::make("reconstruction[" + std::to_string(i) + "]", res,
                                       std::abs(res2 - res), rp.tolerance, Relation::AtMost,
                                       "sum_k X_k^R(c_i^k h) vs sum_j X_j^R G_j^i on " +
                                           std::to_string(rp.points) + " points"));
      }
    }
  }

  if (plan.residual) {
    const auto& p = *plan.residual;
    if (abs_G == 0.0) {
      GPropertyParams gp;
      gp.box = p.abs_G_box;
      const double one = 1.0;
      for (const auto& G : all_kernels(g))
        abs_G = std::max(abs_G, check_G_properties(engine, G, std::span<const double>(&one, 1), gp)
                                    .abs_integral.front());
    }
    const ScalarField f = p.function.field();
    std::vector<double> res, errs, grad_l1;
    Table tab{"commutator_residual", {"points", "spacing", "i", "residual", "gradient_l1", "mu_l1", "tail"}, {}};
    Table box{"residual_box", {"points", "residual", "residual_wide"}, {}};
    for (const auto& grid : p.grids) {
      const double w = worst_residual(f, grid, p.t, engine, &tab);
      const double wide = worst_residual(f, widened(grid, p.margin_cells), p.t, engine, nullptr);
      box.rows.push_back({double(grid.shape[0]), w, wide});
      res.push_back(w);
      errs.push_back(std::abs(wide - w));
      grad_l1.push_back(l1_norm(horizontal_gradient(GridFunction::sample(grid, f.value), g)));
    }
    r.tables.push_back(std::move(box));
    r.tables.push_back(std::move(tab));
    const std::size_t last = res.size() - 1;
    r.checks.push_back(Check::make("residual", res[last] / grad_l1[last], errs[last] / grad_l1[last],
                                   p.tolerance, Relation::AtMost,
                                   "max_i ||X_i W_t f - W_t X_i f - mu_t^i||_1 / ||grad_X f||_1 at t = " +
                                       fmt(p.t)));
    if (res.size() > 1) {
      double worst = std::numeric_limits<double>::infinity(), werr = 0.0;
      for (std::size_t k = 1; k < res.size(); ++k) {
        const double ratio = res[k - 1] / res[k];
        if (ratio < worst) {
          worst = ratio;
          werr = ratio * (errs[k - 1] / res[k - 1] + errs[k] / res[k]);
        }
      }
      r.checks.push_back(Check::make("residual.decrease", worst, werr, p.min_decrease,
                                     Relation::AtLeast, "smallest residual ratio between successive grids"));
    }
    if (!p.mu_bound_ts.empty()) {
      const GridFunction fg = GridFunction::sample(p.grids.back(), f.value);
      const HorizontalVectorField grad = horizontal_gradient(fg, g);
      const double gl1 = l1_norm(grad);
      const double bound = q * abs_G * gl1;
      Table mt{"mu_bound", {"t", "i", "mu_l1", "bound", "tail"}, {}};
      double worst = 0.0, werr = 0.0;
      for (double t : p.mu_bound_ts) {
        for (int i = 0; i < q; ++i) {
          const ConvolutionResult mu = mu_t(i, grad, t, engine);
          const double m = mu.values.l1();
          mt.rows.push_back({t, double(i), m, bound, mu.tail_estimate});
          if (m / bound >= worst) {
            worst = m / bound;
            werr = mu.tail_estimate / bound;
          }
        }
      }
      r.tables.push_back(std::move(mt));
      r.checks.push_back(Check::make("mu_bound", worst, werr, 1.0, Relation::AtMost,
                                     "max ||mu_t^i||_1 / (q int|G| ||grad_X f||_1), int|G| = " +
                                         fmt(abs_G, 8)));
    }
  }

  r.wall_seconds = clock.seconds();
  return r;
}

}  // namespace carnot
