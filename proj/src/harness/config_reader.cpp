#include "harness/config_reader.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "carnot/errors.hpp"
#include "carnot/quadrature.hpp"

namespace carnot::harness {

using nlohmann::json;

void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

Node::Node(const json& j, std::string path, std::initializer_list<const char*> allowed)
    : Node(j, std::move(path), std::vector<std::string>(allowed.begin(), allowed.end())) {}

Node::Node(const json& j, std::string path, const std::vector<std::string>& allowed)
    : j_(&j), path_(std::move(path)) {
  if (!j.is_object()) fail(path_, "expected a table");
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(path_, "unknown key '" + key + "'");
}

bool Node::has(const char* key) const { return j_->contains(key); }

const json& Node::get(const char* key) const {
  if (!j_->contains(key)) fail(child(key), "missing");
  return (*j_)[key];
}

double Node::number(const char* key) const {
  const auto& v = get(key);
  if (!v.is_number()) fail(child(key), "expected a number");
  return v.get<double>();
}

double Node::number(const char* key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long Node::integer(const char* key) const {
  const auto& v = get(key);
  if (v.is_number_integer()) return v.get<long long>();
  // 1e6 style literals
  if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
    return static_cast<long long>(v.get<double>());
  fail(child(key), "expected an integer");
}

long long Node::integer(const char* key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Node::u64(const char* key) const {
  const auto& v = get(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  fail(child(key), "expected a non-negative integer");
}

bool Node::boolean(const char* key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = get(key);
  if (!v.is_boolean()) fail(child(key), "expected true or false");
  return v.get<bool>();
}

std::string Node::string(const char* key) const {
  const auto& v = get(key);
  if (!v.is_string()) fail(child(key), "expected a string");
  return v.get<std::string>();
}

std::string Node::string(const char* key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

std::vector<double> Node::numbers(const char* key) const {
  const auto& v = get(key);
  if (!v.is_array()) fail(child(key), "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(child(key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> Node::matrix(const char* key) const {
  const auto& v = get(key);
  if (!v.is_array()) fail(child(key), "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) {
    if (!row.is_array()) fail(child(key), "expected an array of arrays");
    auto& r = out.emplace_back();
    for (const auto& e : row) {
      if (!e.is_number()) fail(child(key), "expected numbers");
      r.push_back(e.get<double>());
    }
  }
  return out;
}

const json& Node::raw(const char* key) const { return get(key); }

Node Node::table(const char* key, std::initializer_list<const char*> allowed) const {
  return Node(get(key), child(key), allowed);
}

std::vector<const json*> Node::list(const char* key) const {
  const auto& v = get(key);
  if (!v.is_array()) fail(child(key), "expected an array");
  std::vector<const json*> out;
  for (const auto& e : v) out.push_back(&e);
  return out;
}

GroupSpec read_group(const json& j, const std::string& path) {
  if (j.is_string()) return GroupSpec::from_preset(j.get<std::string>());
  Node g(j, path, {"preset", "n", "q", "structure_constants", "name"});
  try {
    if (g.has("preset")) {
      if (g.has("n") || g.has("q") || g.has("structure_constants"))
        fail(path, "give either a preset or structure constants");
      return GroupSpec::from_preset(g.string("preset"));
    }
    return GroupSpec::from_structure_constants(static_cast<int>(g.integer("n")),
                                               static_cast<int>(g.integer("q")),
                                               g.numbers("structure_constants"),
                                               g.string("name", "custom"));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

EngineChoice read_engine(const json& j, const std::string& path) {
  Node e(j, path,
         {"kind", "rel_tol", "max_refinements", "batch_order", "samples", "substeps", "bandwidth",
          "center_bandwidth"});
  EngineChoice c;
  c.kind = e.string("kind", "auto");
  if (c.kind != "auto" && c.kind != "euclidean" && c.kind != "quadrature" && c.kind != "monte_carlo")
    fail(e.child("kind"), "expected auto, euclidean, quadrature or monte_carlo");
  c.quad.rel_tol = e.number("rel_tol", c.quad.rel_tol);
  c.quad.max_refinements = static_cast<int>(e.integer("max_refinements", c.quad.max_refinements));
  c.quad.batch_order = static_cast<int>(e.integer("batch_order", c.quad.batch_order));
  c.mc.samples = static_cast<std::size_t>(e.integer("samples", static_cast<long long>(c.mc.samples)));
  c.mc.substeps = static_cast<int>(e.integer("substeps", c.mc.substeps));
  c.mc.bandwidth = e.number("bandwidth", c.mc.bandwidth);
  c.mc.center_bandwidth = e.number("center_bandwidth", c.mc.center_bandwidth);
  return c;
}

KernelEngine make_engine(const GroupSpec& g, EngineChoice e, std::optional<std::uint64_t> seed) {
  try {
    if (e.kind == "euclidean") return KernelEngine::euclidean(g);
    if (e.kind == "quadrature") return KernelEngine::heisenberg(g, e.quad);
    if (e.kind == "monte_carlo") {
      if (!seed) throw ConfigError("engine: a seed is required for the monte_carlo engine");
      e.mc.seed = *seed;
      return KernelEngine::monte_carlo(g, e.mc);
    }
    if (g.is_abelian()) return KernelEngine::euclidean(g);
    if (g.is_standard_heisenberg()) return KernelEngine::heisenberg(g, e.quad);
    throw ConfigError("engine: no analytic engine for group " + g.name() +
                      "; select monte_carlo");
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("engine: ") + ex.what());
  }
}

std::vector<double> read_t_grid(const json& j, const std::string& path) {
  if (j.is_array()) {
    std::vector<double> ts;
    for (const auto& v : j) {
      if (!v.is_number()) fail(path, "expected numbers");
      ts.push_back(v.get<double>());
    }
    if (ts.empty()) fail(path, "empty t-grid");
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (!(ts[k] > 0.0)) fail(path, "times must be positive");
      if (k > 0 && !(ts[k] < ts[k - 1])) fail(path, "times must be strictly decreasing");
    }
    return ts;
  }
  Node n(j, path, {"t0", "ratio", "count"});
  const double t0 = n.number("t0"), r = n.number("ratio");
  const long long c = n.integer("count");
  if (!(t0 > 0.0)) fail(n.child("t0"), "must be positive");
  if (!(r > 0.0 && r < 1.0)) fail(n.child("ratio"), "must lie in (0, 1)");
  if (c < 1) fail(n.child("count"), "must be at least 1");
  return geometric_grid(t0, r, static_cast<int>(c));
}

GridSpec read_grid(const json& j, const std::string& path, int n) {
  Node g(j, path, {"half_width", "points", "lo", "hi", "shape"});
  GridSpec s;
  if (g.has("half_width")) {
    s = GridSpec::cube(n, g.number("half_width"), static_cast<int>(g.integer("points")));
  } else {
    s.lo = g.numbers("lo");
    s.hi = g.numbers("hi");
    for (double v : g.numbers("shape")) s.shape.push_back(static_cast<int>(v));
  }
  if (s.dim() != n) fail(path, "grid dimension does not match the group");
  try {
    s.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return s;
}

HeatRuleParams read_rule(const json& j, const std::string& path) {
  Node r(j, path,
         {"radial", "angular", "radius", "center_panels", "center_order", "center_half_width",
          "drop", "draws"});
  HeatRuleParams p;
  p.radial = static_cast<int>(r.integer("radial", p.radial));
  p.angular = static_cast<int>(r.integer("angular", p.angular));
  p.radius = r.number("radius", p.radius);
  p.center_panels = static_cast<int>(r.integer("center_panels", p.center_panels));
  p.center_order = static_cast<int>(r.integer("center_order", p.center_order));
  p.center_half_width = r.number("center_half_width", p.center_half_width);
  p.drop = r.number("drop", p.drop);
  p.draws = static_cast<std::size_t>(r.integer("draws", static_cast<long long>(p.draws)));
  return p;
}

KernelBoxParams read_box(const json& j, const std::string& path) {
  Node b(j, path, {"first_half_width", "center_half_width", "first_points", "center_points"});
  KernelBoxParams p;
  p.first_half_width = b.number("first_half_width", p.first_half_width);
  p.center_half_width = b.number("center_half_width", p.center_half_width);
  p.first_points = static_cast<int>(b.integer("first_points", p.first_points));
  p.center_points = static_cast<int>(b.integer("center_points", p.center_points));
  return p;
}

SurfaceParams read_surface(const json& j, const std::string& path) {
  Node s(j, path, {"order", "window"});
  SurfaceParams p;
  p.order = static_cast<int>(s.integer("order", p.order));
  p.window = s.number("window", p.window);
  return p;
}

PhiParams read_phi(const json& j, const std::string& path) {
  Node s(j, path, {"order", "half_width", "center_half_width", "center_step"});
  PhiParams p;
  p.order = static_cast<int>(s.integer("order", p.order));
  p.half_width = s.number("half_width", p.half_width);
  p.center_half_width = s.number("center_half_width", p.center_half_width);
  p.center_step = s.number("center_step", p.center_step);
  return p;
}

RegionSpec read_region(const json& j, const std::string& path, int n) {
  Node r(j, path, {"kind", "center", "radius", "axes", "nu"});
  const std::string kind = r.string("kind");
  try {
    if (kind == "ball") {
      auto c = r.has("center") ? r.numbers("center") : std::vector<double>(n, 0.0);
      if (static_cast<int>(c.size()) != n) fail(r.child("center"), "dimension mismatch");
      return RegionSpec::ball(c, r.number("radius"));
    }
    if (kind == "ellipsoid") {
      auto c = r.has("center") ? r.numbers("center") : std::vector<double>(n, 0.0);
      auto a = r.numbers("axes");
      if (static_cast<int>(c.size()) != n || static_cast<int>(a.size()) != n)
        fail(path, "dimension mismatch");
      return RegionSpec::ellipsoid(c, a);
    }
    if (kind == "halfspace") return RegionSpec::vertical_halfspace(r.numbers("nu"), n);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(r.child("kind"), "expected ball, ellipsoid or halfspace");
}

std::string describe(const RegionSpec& E) {
  std::ostringstream os;
  auto vec = [&](const std::vector<double>& v) {
    os << '(';
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
    os << ')';
  };
  switch (E.kind()) {
    case RegionSpec::Kind::EuclideanBall:
      os << "ball c=";
      vec(E.center());
      os << " r=" << E.radius();
      break;
    case RegionSpec::Kind::Ellipsoid:
      os << "ellipsoid c=";
      vec(E.center());
      os << " a=";
      vec(E.axes());
      break;
    case RegionSpec::Kind::VerticalHalfspace:
      os << "halfspace nu=";
      vec(E.nu());
      break;
    case RegionSpec::Kind::LevelSet:
      os << "level set";
      break;
  }
  return os.str();
}

namespace {

// gauge(x) = |A^{-1}(x - c)|
double gauge(const FunctionSpec& f, std::span<const double> x) {
  double r2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double u = (x[a] - f.center[a]) / f.axes[a];
    r2 += u * u;
  }
  return std::sqrt(r2);
}

}  // namespace

ScalarField FunctionSpec::field() const {
  const FunctionSpec f = *this;
  auto profile = [f](double r) {
    if (f.kind == "gaussian") return std::exp(-r * r / f.scale);
    if (f.kind == "cone") return std::max(0.0, 1.0 - r / f.radius);
    return 0.5 * std::erfc((r - 1.0) / f.width);
  };
  auto dprofile = [f](double r) {
    if (f.kind == "gaussian") return -2.0 * r / f.scale * std::exp(-r * r / f.scale);
    if (f.kind == "cone") return r < f.radius ? -1.0 / f.radius : 0.0;
    const double u = (r - 1.0) / f.width;
    return -std::exp(-u * u) / (f.width * std::sqrt(std::numbers::pi));
  };
  ScalarField s;
  s.value = [f, profile](std::span<const double> x) { return profile(gauge(f, x)); };
  s.gradient = [f, dprofile](std::span<const double> x, std::span<double> g) {
    const double r = gauge(f, x);
    // the cone is not differentiable at its apex; any subgradient has measure zero
    if (r == 0.0) {
      std::fill(g.begin(), g.end(), 0.0);
      return;
    }
    const double d = dprofile(r);
    for (std::size_t a = 0; a < x.size(); ++a)
      g[a] = d * (x[a] - f.center[a]) / (f.axes[a] * f.axes[a] * r);
  };
  return s;
}

double FunctionSpec::tau_hi() const {
  if (kind == "mollified") return 0.5 * std::erfc(-1.0 / width);
  return 1.0;
}

RegionSpec FunctionSpec::level(double tau) const {
  double rho = 0.0;
  if (kind == "gaussian") rho = std::sqrt(-scale * std::log(tau));
  else if (kind == "cone") rho = radius * (1.0 - tau);
  else rho = 1.0 + width * boost::math::erfc_inv(2.0 * tau);
  std::vector<double> a(axes);
  for (double& v : a) v *= rho;
  return RegionSpec::ellipsoid(center, a);
}

double FunctionSpec::profile_reference(const GroupSpec& g, const SurfaceParams& s) const {
  double lo = 0.0, hi = 0.0;
  if (kind == "gaussian") {
    hi = std::sqrt(40.0 * scale);
  } else if (kind == "cone") {
    hi = radius;
  } else {
    lo = std::max(0.0, 1.0 - 8.0 * width);
    hi = 1.0 + 8.0 * width;
  }
  const Rule1D rule = composite_gauss_legendre(24, 8, lo, hi);
  const ScalarField phi = field();
  double total = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double rho = rule.nodes[k];
    double d = 0.0;
    if (kind == "gaussian") d = 2.0 * rho / scale * std::exp(-rho * rho / scale);
    else if (kind == "cone") d = 1.0 / radius;
    else {
      const double u = (rho - 1.0) / width;
      d = std::exp(-u * u) / (width * std::sqrt(std::numbers::pi));
    }
    std::vector<double> a(axes);
    for (double& v : a) v *= rho;
    total += rule.weights[k] * d * perimeter_smooth(RegionSpec::ellipsoid(center, a), g, s);
  }
  return total;
}

std::optional<double> FunctionSpec::analytic_reference(const GroupSpec& g) const {
  if (kind != "gaussian" || !g.is_abelian()) return std::nullopt;
  if (std::any_of(axes.begin(), axes.end(), [](double a) { return a != 1.0; })) return std::nullopt;
  const double n = g.dim();
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  return sphere * std::pow(scale, 0.5 * (n - 1)) * std::tgamma(0.5 * (n + 1));
}

FunctionSpec read_function(const json& j, const std::string& path, int n) {
  Node r(j, path, {"kind", "name", "center", "axes", "radius", "scale", "width"});
  FunctionSpec f;
  f.kind = r.string("kind");
  if (f.kind != "gaussian" && f.kind != "mollified" && f.kind != "cone")
    fail(r.child("kind"), "expected gaussian, mollified or cone");
  f.name = r.string("name", f.kind);
  f.center = r.has("center") ? r.numbers("center") : std::vector<double>(n, 0.0);
  if (static_cast<int>(f.center.size()) != n) fail(r.child("center"), "dimension mismatch");
  f.scale = r.number("scale", 1.0);
  f.width = r.number("width", 0.25);
  f.radius = r.number("radius", 1.0);
  if (r.has("axes")) {
    if (f.kind != "mollified") fail(r.child("axes"), "only mollified functions take axes");
    f.axes = r.numbers("axes");
    if (static_cast<int>(f.axes.size()) != n) fail(r.child("axes"), "dimension mismatch");
  } else {
    f.axes.assign(n, f.kind == "mollified" ? f.radius : 1.0);
  }
  if (!(f.scale > 0.0) || !(f.width > 0.0) || !(f.radius > 0.0) ||
      std::any_of(f.axes.begin(), f.axes.end(), [](double a) { return !(a > 0.0); }))
    fail(path, "scale, width, radius and axes must be positive");
  return f;
}

}  // namespace carnot::harness
