#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "carnot/bv_functionals.hpp"
#include "harness/suite_common.hpp"

namespace carnot {

using namespace harness;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConvolutionOptions read_convolution(const nlohmann::json& j, const std::string& path) {
  Node n(j, path, {"path", "pad_factor", "positivity_filter", "truncation_eps"});
  ConvolutionOptions o;
  const std::string p = n.string("path", "auto");
  if (p == "auto") o.path = ConvolutionPath::Auto;
  else if (p == "central_fourier") o.path = ConvolutionPath::CentralFourier;
  else if (p == "separable") o.path = ConvolutionPath::Separable;
  else if (p == "direct") o.path = ConvolutionPath::Direct;
  else fail(n.child("path"), "expected auto, central_fourier, separable or direct");
  o.pad_factor = static_cast<int>(n.integer("pad_factor", o.pad_factor));
  o.positivity_filter = n.boolean("positivity_filter", o.positivity_filter);
  o.truncation_eps = n.number("truncation_eps", o.truncation_eps);
  return o;
}

struct DeGiorgiPlan {
  std::vector<FunctionSpec> functions;
  GridSpec grid;
  std::vector<double> ts;
  int degree = 2;
  // fit in t^fit_exponent
  double fit_exponent = 0.5;
  bool analytic = false;
  SurfaceParams surface{};
  std::optional<double> limit_tolerance;
  std::optional<double> lower_factor;
  DeGiorgiOptions options{};
};

struct LedouxPlan {
  FunctionSpec function;
  GridSpec grid;
  std::vector<double> ts;
  int degree = 2;
  HeatRuleParams rule{};
  SurfaceParams surface{};
  PhiParams phi{};
  double limit_tolerance = 0.05;
};

struct PhiPlan {
  int normals = 8;
  PhiParams phi{};
  double tolerance = 1e-3;
};

struct VariationPlan {
  Common common;
  std::optional<DeGiorgiPlan> de_giorgi;
  std::optional<LedouxPlan> ledoux;
  std::optional<PhiPlan> phi;
};

VariationPlan read_plan(const ExperimentConfig& config) {
  VariationPlan p;
  p.common = read_common(config, "variation", {"de_giorgi", "ledoux", "phi_constancy"});
  const int n = p.common.group.dim();
  const auto& d = config.doc;
  if (d.contains("de_giorgi")) {
    Node s(d["de_giorgi"], "de_giorgi",
           {"functions", "grid", "t_grid", "degree", "fit_variable", "reference", "surface",
            "limit_tolerance", "lower_factor", "gradient", "convolution"});
    DeGiorgiPlan q;
    const auto fs = s.list("functions");
    for (std::size_t k = 0; k < fs.size(); ++k)
      q.functions.push_back(read_function(*fs[k], "de_giorgi.functions[" + std::to_string(k) + "]", n));
    if (q.functions.empty()) fail(s.child("functions"), "at least one function");
    q.grid = read_grid(s.raw("grid"), s.child("grid"), n);
    q.ts = read_t_grid(s.raw("t_grid"), s.child("t_grid"));
    q.degree = static_cast<int>(s.integer("degree", q.degree));
    const std::string var = s.string("fit_variable", "sqrt_t");
    if (var == "t") q.fit_exponent = 1.0;
    else if (var != "sqrt_t") fail(s.child("fit_variable"), "expected sqrt_t or t");
    const std::string ref = s.string("reference", "profile");
    if (ref != "profile" && ref != "analytic") fail(s.child("reference"), "expected profile or analytic");
    q.analytic = ref == "analytic";
    if (q.analytic)
      for (const auto& f : q.functions)
        if (!f.analytic_reference(p.common.group))
          fail(s.child("reference"), "no closed form for function '" + f.name + "'");
    if (s.has("surface")) q.surface = read_surface(s.raw("surface"), s.child("surface"));
    if (s.has("limit_tolerance")) q.limit_tolerance = s.number("limit_tolerance");
    if (s.has("lower_factor")) q.lower_factor = s.number("lower_factor");
    const std::string grad = s.string("gradient", "kernel");
    if (grad == "kernel") q.options.gradient = GradientPath::KernelDerivative;
    else if (grad == "stencil") q.options.gradient = GradientPath::Stencil;
    else fail(s.child("gradient"), "expected kernel or stencil");
    if (s.has("convolution")) q.options.convolution = read_convolution(s.raw("convolution"), s.child("convolution"));
    p.de_giorgi = q;
  }
  if (d.contains("ledoux")) {
    Node s(d["ledoux"], "ledoux",
           {"function", "grid", "t_grid", "degree", "rule", "surface", "phi", "limit_tolerance"});
    LedouxPlan q;
    q.function = read_function(s.raw("function"), s.child("function"), n);
    q.grid = read_grid(s.raw("grid"), s.child("grid"), n);
    q.ts = read_t_grid(s.raw("t_grid"), s.child("t_grid"));
    q.degree = static_cast<int>(s.integer("degree", q.degree));
    if (s.has("rule")) q.rule = read_rule(s.raw("rule"), s.child("rule"));
    if (s.has("surface")) q.surface = read_surface(s.raw("surface"), s.child("surface"));
    if (s.has("phi")) q.phi = read_phi(s.raw("phi"), s.child("phi"));
    q.limit_tolerance = s.number("limit_tolerance", q.limit_tolerance);
    p.ledoux = q;
  }
  if (d.contains("phi_constancy")) {
    Node s(d["phi_constancy"], "phi_constancy", {"normals", "phi", "tolerance"});
    PhiPlan q;
    q.normals = static_cast<int>(s.integer("normals", q.normals));
    if (q.normals < 2) fail(s.child("normals"), "at least 2");
    if (s.has("phi")) q.phi = read_phi(s.raw("phi"), s.child("phi"));
    q.tolerance = s.number("tolerance", q.tolerance);
    p.phi = q;
  }
  return p;
}

double reference_for(const FunctionSpec& f, const GroupSpec& g, bool analytic,
                     const SurfaceParams& s) {
  if (analytic) return *f.analytic_reference(g);
  return f.profile_reference(g, s);
}

std::vector<double> unit_normal(const GroupSpec& g, int k, int count, std::mt19937_64& rng) {
  const int q = g.horizontal_dim();
  std::vector<double> nu(q, 0.0);
  if (q == 1) {
    nu[0] = 1.0;
  } else if (q == 2) {
    const double a = std::numbers::pi * k / count;
    nu[0] = std::cos(a);
    nu[1] = std::sin(a);
  } else {
    std::normal_distribution<double> nd;
    double s = 0.0;
    for (double& v : nu) {
      v = nd(rng);
      s += v * v;
    }
    for (double& v : nu) v /= std::sqrt(s);
  }
  return nu;
}

}  // namespace

RunReport run_variation_sweep(const ExperimentConfig& config) {
  const Stopwatch clock;
  const VariationPlan plan = read_plan(config);
  const GroupSpec& g = plan.common.group;
  const KernelEngine engine = make_engine(g, plan.common.engine, plan.common.seed);
  RunReport r = start_report("variation", config);
  r.engine = engine.describe();
  if (const auto* mc = engine.mc_params()) r.samples += mc->samples;
  std::mt19937_64 rng(plan.common.seed.value_or(1));

  if (plan.de_giorgi) {
    const auto& p = *plan.de_giorgi;
    for (const auto& f : p.functions) {
      const double ref = reference_for(f, g, p.analytic, p.surface);
      const GridFunction fg = GridFunction::sample(p.grid, f.field().value);
      std::vector<double> vs, tails;
      for (double t : p.ts) {
        const FunctionalValue v = de_giorgi_functional(fg, t, engine, p.options);
        vs.push_back(v.value);
        tails.push_back(v.tail);
      }
      const VariationReport vr = make_variation_report(p.ts, vs, tails, ref, p.degree, p.fit_exponent);
      const std::string name = "de_giorgi." + f.name;
      std::vector<double> ratio;
      for (double v : vs) ratio.push_back(v / ref);
      r.tables.push_back(sweep_table(name, p.ts, {{"value", vs}, {"tail", tails}, {"ratio", ratio}}));
      r.limits.push_back({name, vr.limit.limit, vr.limit.error, vr.limit.degree, ref});
      const double tail_max = *std::max_element(tails.begin(), tails.end());
      if (p.limit_tolerance)
        r.checks.push_back(Check::make(name + ".limit", rel(vr.limit.limit, ref),
                                       (vr.limit.error + tail_max) / ref, *p.limit_tolerance,
                                       Relation::AtMost,
                                       "extrapolated limit " + fmt(vr.limit.limit) + " vs reference " +
                                           fmt(ref)));
      if (p.lower_factor) {
        std::size_t lo = 0;
        for (std::size_t k = 1; k < vs.size(); ++k)
          if (vs[k] < vs[lo]) lo = k;
        r.checks.push_back(Check::make(name + ".lower", vs[lo] / ref, tails[lo] / ref, *p.lower_factor,
                                       Relation::AtLeast,
                                       "smallest value / reference, at t = " + fmt(p.ts[lo])));
        double c_fit = 0.0;
        for (std::size_t k = 0; k < vs.size(); ++k)
          c_fit = std::max(c_fit, (vs[k] + tails[k]) / ref - 1.0);
        r.checks.push_back(Check::make(name + ".c_fit", c_fit, 0.0, kInf, Relation::AtMost,
                                       "every value <= (1 + c_fit) reference"));
      }
    }
  }

  if (plan.ledoux) {
    const auto& p = *plan.ledoux;
    const double ref = p.function.profile_reference(g, p.surface);
    std::vector<double> e1(g.horizontal_dim(), 0.0);
    e1[0] = 1.0;
    const double phi = phi_G(e1, engine, p.phi);
    const double target = phi * ref;
    const HeatRule rule = heat_rule(engine, p.rule);
    if (engine.mc_params()) r.samples += rule.size();
    const ScalarField field = p.function.field();
    std::vector<double> vs, tails;
    for (double t : p.ts) {
      const FunctionalValue v = ledoux_functional(field.value, p.grid, t, engine, rule);
      vs.push_back(v.value);
      tails.push_back(v.tail);
    }
    const VariationReport vr = make_variation_report(p.ts, vs, tails, target, p.degree);
    const std::string name = "ledoux." + p.function.name;
    std::vector<double> ratio;
    for (double v : vs) ratio.push_back(v / target);
    r.tables.push_back(sweep_table(name, p.ts, {{"value", vs}, {"tail", tails}, {"ratio", ratio}}));
    r.tables.push_back({"ledoux.constants",
                        {"phi_G", "reference", "target", "rule_nodes", "rule_mass"},
                        {{phi, ref, target, static_cast<double>(rule.size()), rule.mass}}});
    r.limits.push_back({name, vr.limit.limit, vr.limit.error, vr.limit.degree, target});
    const double tail_max = *std::max_element(tails.begin(), tails.end());
    r.checks.push_back(Check::make(name + ".limit", rel(vr.limit.limit, target),
                                   (vr.limit.error + tail_max) / target, p.limit_tolerance,
                                   Relation::AtMost,
                                   "extrapolated limit " + fmt(vr.limit.limit) + " vs phi_G |D f| " +
                                       fmt(target)));
  }

  if (plan.phi) {
    const auto& p = *plan.phi;
    Table tab{"phi_G", {"index", "nu_0", "nu_1", "phi"}, {}};
    std::vector<double> vals;
    for (int k = 0; k < p.normals; ++k) {
      const auto nu = unit_normal(g, k, p.normals, rng);
      const double v = phi_G(nu, engine, p.phi);
      vals.push_back(v);
      tab.rows.push_back({static_cast<double>(k), nu[0], nu.size() > 1 ? nu[1] : 0.0, v});
    }
    // error bar: change under a coarser rule at the first normal
    PhiParams coarse = p.phi;
    coarse.order = std::max(8, 2 * p.phi.order / 3);
    coarse.center_step = 1.5 * p.phi.center_step;
    const double v_coarse = phi_G(unit_normal(g, 0, p.normals, rng), engine, coarse);
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    double mean = 0.0;
    for (double v : vals) mean += v / vals.size();
    r.tables.push_back(std::move(tab));
    r.checks.push_back(Check::make("phi_constancy", (*hi - *lo) / mean, rel(v_coarse, vals[0]),
                                   p.tolerance, Relation::AtMost,
                                   "relative spread of phi_G over " + std::to_string(p.normals) +
                                       " normals, mean " + fmt(mean, 10)));
  }

  r.wall_seconds = clock.seconds();
  return r;
}

}  // namespace carnot
