#include <algorithm>
#include <cmath>
#include <random>

#include "carnot/errors.hpp"
#include "carnot/heat_kernel.hpp"
#include "harness/suite_common.hpp"

namespace carnot {

using namespace harness;

namespace {

struct MassPlan {
  double t = 1.0;
  KernelBoxParams box{7.0, 14.0, 64, 64};
  double tolerance = 5e-3;
};

struct SymmetryPlan {
  double t = 1.0;
  int points = 50;
  double radius = 2.5;
  double tolerance = 1e-6;
};

struct HomogeneityPlan {
  int points = 50;
  double radius = 2.5;
  double lambda_lo = 0.5, lambda_hi = 2.0;
  double t_lo = 0.25, t_hi = 4.0;
  double tolerance = 1e-6;
};

struct CrossPlan {
  double t = 1.0;
  std::vector<std::vector<double>> points;
  MonteCarloParams mc{};
  double tolerance = 0.05;
  // error bar = sigmas * sampling standard error
  double sigmas = 2.0;
};

struct FitPlan {
  std::vector<double> ts{0.25, 1.0, 4.0};
  int points = 200;
  double radius = 3.0;
};

struct KernelPlan {
  Common common;
  std::optional<MassPlan> mass;
  std::optional<SymmetryPlan> symmetry;
  std::optional<HomogeneityPlan> homogeneity;
  std::optional<CrossPlan> cross;
  std::optional<FitPlan> fit;
};

KernelPlan read_plan(const ExperimentConfig& config) {
  KernelPlan p;
  p.common = read_common(config, "kernel",
                         {"mass", "symmetry", "homogeneity", "cross_engine", "gaussian_fit"});
  const auto& d = config.doc;
  if (d.contains("mass")) {
    Node n(d["mass"], "mass", {"t", "box", "tolerance"});
    MassPlan m;
    m.t = n.number("t", m.t);
    if (n.has("box")) m.box = read_box(n.raw("box"), n.child("box"));
    m.tolerance = n.number("tolerance", m.tolerance);
    p.mass = m;
  }
  if (d.contains("symmetry")) {
    Node n(d["symmetry"], "symmetry", {"t", "points", "radius", "tolerance"});
    SymmetryPlan s;
    s.t = n.number("t", s.t);
    s.points = static_cast<int>(n.integer("points", s.points));
    s.radius = n.number("radius", s.radius);
    s.tolerance = n.number("tolerance", s.tolerance);
    p.symmetry = s;
  }
  if (d.contains("homogeneity")) {
    Node n(d["homogeneity"], "homogeneity", {"points", "radius", "lambda", "t", "tolerance"});
    HomogeneityPlan h;
    h.points = static_cast<int>(n.integer("points", h.points));
    h.radius = n.number("radius", h.radius);
    if (n.has("lambda")) {
      const auto l = n.numbers("lambda");
      if (l.size() != 2 || !(l[0] > 0.0) || !(l[1] >= l[0])) fail(n.child("lambda"), "expected [lo, hi]");
      h.lambda_lo = l[0];
      h.lambda_hi = l[1];
    }
    if (n.has("t")) {
      const auto l = n.numbers("t");
      if (l.size() != 2 || !(l[0] > 0.0) || !(l[1] >= l[0])) fail(n.child("t"), "expected [lo, hi]");
      h.t_lo = l[0];
      h.t_hi = l[1];
    }
    h.tolerance = n.number("tolerance", h.tolerance);
    p.homogeneity = h;
  }
  if (d.contains("cross_engine")) {
    Node n(d["cross_engine"], "cross_engine",
           {"t", "points", "samples", "substeps", "bandwidth", "center_bandwidth", "tolerance", "sigmas"});
    CrossPlan c;
    c.t = n.number("t", c.t);
    c.points = n.matrix("points");
    for (const auto& x : c.points)
      if (static_cast<int>(x.size()) != p.common.group.dim()) fail(n.child("points"), "dimension mismatch");
    c.mc.samples = static_cast<std::size_t>(n.integer("samples", static_cast<long long>(c.mc.samples)));
    c.mc.substeps = static_cast<int>(n.integer("substeps", c.mc.substeps));
    c.mc.bandwidth = n.number("bandwidth", c.mc.bandwidth);
    c.mc.center_bandwidth = n.number("center_bandwidth", c.mc.center_bandwidth);
    c.tolerance = n.number("tolerance", c.tolerance);
    c.sigmas = n.number("sigmas", c.sigmas);
    if (!p.common.seed) fail("seed", "required by cross_engine");
    c.mc.seed = *p.common.seed;
    p.cross = c;
  }
  if (d.contains("gaussian_fit")) {
    Node n(d["gaussian_fit"], "gaussian_fit", {"ts", "points", "radius"});
    FitPlan f;
    if (n.has("ts")) f.ts = n.numbers("ts");
    f.points = static_cast<int>(n.integer("points", f.points));
    f.radius = n.number("radius", f.radius);
    p.fit = f;
  }
  return p;
}

// First layer uniform in [-R, R], centre in [-R^2, R^2].
std::vector<GroupPoint> random_points(const GroupSpec& g, int count, double R, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<GroupPoint> out;
  for (int k = 0; k < count; ++k) {
    GroupPoint x(static_cast<std::size_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) x[a] = u(rng) * (a < g.horizontal_dim() ? R : R * R);
    out.push_back(std::move(x));
  }
  return out;
}

double quad_error(const KernelEngine& e) {
  if (const auto* q = e.quad_params()) return q->rel_tol;
  return 0.0;
}

}  // namespace

RunReport run_kernel_suite(const ExperimentConfig& config) {
  const Stopwatch clock;
  const KernelPlan plan = read_plan(config);
  const GroupSpec& g = plan.common.group;
  const KernelEngine engine = make_engine(g, plan.common.engine, plan.common.seed);
  RunReport r = start_report("kernel", config);
  r.engine = engine.describe();
  if (const auto* mc = engine.mc_params()) r.samples += mc->samples;
  std::mt19937_64 rng(plan.common.seed.value_or(1));
  const int Q = g.homogeneous_dim();

  if (plan.mass) {
    const auto& m = *plan.mass;
    const GridSpec box = kernel_box(g, m.t, m.box);
    const MassReport mr = kernel_mass(engine, m.t, box, std::numeric_limits<double>::infinity());
    r.checks.push_back(Check::make("mass", std::abs(mr.mass - 1.0), mr.tail_estimate, m.tolerance,
                                   Relation::AtMost,
                                   "|int h(t) - 1| with box tail as error, mass " + fmt(mr.mass, 10)));
  }

  if (plan.symmetry) {
    const auto& s = *plan.symmetry;
    const auto xs = random_points(g, s.points, s.radius, rng);
    std::vector<double> zero(g.dim(), 0.0);
    const double h0 = engine.eval(s.t, zero);
    double worst = 0.0, worst_se = 0.0;
    Table tab{"symmetry", {"index", "h(x)", "h(-x)"}, {}};
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const GroupPoint mx = inverse(xs[k]);
      const KernelEstimate a = engine.estimate(s.t, xs[k].coords()), b = engine.estimate(s.t, mx.coords());
      if (std::abs(a.value - b.value) >= worst) {
        worst = std::abs(a.value - b.value);
        worst_se = a.std_error + b.std_error;
      }
      tab.rows.push_back({static_cast<double>(k), a.value, b.value});
    }
    r.tables.push_back(std::move(tab));
    // quadrature tolerance, or two standard errors of each Monte Carlo estimate
    r.checks.push_back(Check::make("symmetry", worst / h0, 2.0 * (quad_error(engine) + worst_se / h0),
                                   s.tolerance, Relation::AtMost, "max |h(x) - h(-x)| / h(0)"));
  }

  if (plan.homogeneity) {
    const auto& h = *plan.homogeneity;
    const auto xs = random_points(g, h.points, h.radius, rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    Table tab{"homogeneity", {"index", "lambda", "t", "residual"}, {}};
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double lam = h.lambda_lo * std::pow(h.lambda_hi / h.lambda_lo, u(rng));
      const double t = h.t_lo * std::pow(h.t_hi / h.t_lo, u(rng));
      // points are drawn at unit scale and carried to scale sqrt(t)
      const GroupPoint x = dilate(std::sqrt(t), xs[k], g);
      const GroupPoint y = dilate(lam, x, g);
      const double a = std::pow(lam, Q) * engine.eval(lam * lam * t, y.coords());
      const double b = engine.eval(t, x.coords());
      const double res = rel(a, b);
      worst = std::max(worst, res);
      tab.rows.push_back({static_cast<double>(k), lam, t, res});
    }
    r.tables.push_back(std::move(tab));
    r.checks.push_back(Check::make("homogeneity", worst, 2.0 * quad_error(engine), h.tolerance,
                                   Relation::AtMost,
                                   "max |l^Q h(l^2 t, D(l) x) - h(t, x)| / h(t, x)"));
  }

  if (plan.cross) {
    const auto& c = *plan.cross;
    const KernelEngine mc = KernelEngine::monte_carlo(g, c.mc);
    r.samples += c.mc.samples;
    Table tab{"cross_engine", {"index", "engine", "monte_carlo", "std_error", "relative"}, {}};
    double worst = 0.0, worst_err = 0.0, worst_total = -1.0;
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      const double a = engine.eval(c.t, c.points[k]);
      const KernelEstimate b = mc.estimate(c.t, c.points[k]);
      const double rr = rel(b.value, a), err = c.sigmas * b.std_error / std::abs(a);
      tab.rows.push_back({static_cast<double>(k), a, b.value, b.std_error, rr});
      if (rr + err > worst_total) {
        worst_total = rr + err;
        worst = rr;
        worst_err = err;
      }
    }
    r.tables.push_back(std::move(tab));
    r.checks.push_back(Check::make("cross_engine", worst, worst_err, c.tolerance, Relation::AtMost,
                                   "worst point: relative gap, error " + fmt(c.sigmas, 2) +
                                       " KDE standard errors"));
  }

  if (plan.fit) {
    const auto& f = *plan.fit;
    const auto xs = random_points(g, f.points, f.radius, rng);
    const BoundFit fit = gaussian_bound_fit(engine, f.ts, xs);
    r.tables.push_back({"gaussian_fit", {"c_lower", "c_upper"}, {{fit.c_lower, fit.c_upper}}});
    r.checks.push_back(Check::make("gaussian_fit", std::max(fit.c_lower, fit.c_upper), 0.0,
                                   std::numeric_limits<double>::infinity(), Relation::AtMost,
                                   "two-sided Gaussian bound constants are finite"));
  }

  r.wall_seconds = clock.seconds();
  return r;
}

}  // namespace carnot
