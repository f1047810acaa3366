#include "carnot/bv_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "carnot/errors.hpp"
#include "carnot/semigroup.hpp"

namespace carnot {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Orthonormal basis of the complement of nu in R^q.
std::vector<std::vector<double>> complement_basis(std::span<const double> nu) {
  const int q = static_cast<int>(nu.size());
  std::vector<std::vector<double>> basis{std::vector<double>(nu.begin(), nu.end())};
  for (int e = 0; e < q && static_cast<int>(basis.size()) < q; ++e) {
    std::vector<double> v(q, 0.0);
    v[e] = 1.0;
    for (const auto& b : basis) {
      double d = 0.0;
      for (int i = 0; i < q; ++i) d += b[i] * v[i];
      for (int i = 0; i < q; ++i) v[i] -= d * b[i];
    }
    const double m = norm(v);
    if (m < 1e-8) continue;
    for (double& x : v) x /= m;
    basis.push_back(std::move(v));
  }
  basis.erase(basis.begin());
  return basis;
}

// Midpoint cells over a box in R^{m}.
struct BaseGrid {
  std::vector<double> nodes;
  double cell = 1.0;
  int m = 0;
  std::size_t size() const { return m == 0 ? 1 : nodes.size() / m; }
  std::span<const double> node(std::size_t k) const {
    return {nodes.data() + k * m, static_cast<std::size_t>(m)};
  }
};

BaseGrid midpoint_grid(std::span<const double> lo, std::span<const double> hi, int cells) {
  BaseGrid g;
  g.m = static_cast<int>(lo.size());
  std::vector<double> h(g.m);
  for (int a = 0; a < g.m; ++a) {
    h[a] = (hi[a] - lo[a]) / cells;
    g.cell *= h[a];
  }
  if (g.m == 0) return g;
  std::vector<int> idx(g.m, 0);
  while (true) {
    for (int a = 0; a < g.m; ++a) g.nodes.push_back(lo[a] + (idx[a] + 0.5) * h[a]);
    int a = g.m - 1;
    while (a >= 0 && ++idx[a] == cells) idx[a--] = 0;
    if (a < 0) break;
  }
  return g;
}

void check_substitution_group(const GroupSpec& spec) {
  if (!spec.is_abelian() && spec.center_dim() < 1)
    throw DimensionError("substitution path needs the last axis in the centre");
}

}  // namespace

std::vector<double> horizontal_normal(const RegionSpec& E, std::span<const double> x,
                                      const GroupSpec& spec) {
  const int n = spec.dim(), q = spec.horizontal_dim();
  if (E.dim() != n) throw DimensionError("region and group dimensions differ");
  std::vector<double> g(n);
  E.defining_gradient(x, g);
  const double m = norm(g);
  if (!(m > 0.0)) throw ConvergenceError("degenerate boundary normal", m);
  for (double& v : g) v = -v / m;
  std::vector<double> v(q);
  for (int i = 0; i < q; ++i) v[i] = left_field_from_gradient(i, g, x, spec);
  return v;
}

double perimeter_weighted(const RegionSpec& E, const GroupSpec& spec,
                          const std::function<double(std::span<const double>)>& weight,
                          const SurfaceParams& p) {
  const int q = spec.horizontal_dim();
  if (E.dim() != spec.dim()) throw DimensionError("region and group dimensions differ");
  const SurfaceRule s = surface_rule(E, p);
  double total = 0.0;
#pragma omp parallel reduction(+ : total)
  {
    std::vector<double> v(q);
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto x = s.point(k);
      const auto nE = s.normal(k);
      for (int i = 0; i < q; ++i) v[i] = left_field_from_gradient(i, nE, x, spec);
      const double m = norm(v);
      if (m == 0.0) continue;
      double w = 1.0;
      if (weight) {
        for (double& c : v) c /= m;
        w = weight(v);
      }
      total += s.weights[k] * m * w;
    }
  }
  return total;
}

double perimeter_smooth(const RegionSpec& E, const GroupSpec& spec, const SurfaceParams& p) {
  return perimeter_weighted(E, spec, nullptr, p);
}

double phi_G(std::span<const double> nu, const KernelEngine& engine, const PhiParams& p) {
  const GroupSpec& spec = engine.group();
  const int n = spec.dim(), q = spec.horizontal_dim(), m = spec.center_dim();
  if (static_cast<int>(nu.size()) != q) throw DimensionError("phi_G normal must be a q-vector");
  if (std::abs(norm(nu) - 1.0) > 1e-12) throw std::invalid_argument("phi_G normal must be a unit vector");
  const auto basis = complement_basis(nu);
  const int d = q - 1;
  const Rule1D r = gauss_legendre(p.order, -p.half_width, p.half_width);
  const int nz = 2 * static_cast<int>(std::llround(p.center_half_width / p.center_step)) + 1;
  // tensor over in-plane first-layer directions and all centre axes but the last
  std::size_t outer = 1;
  for (int a = 0; a < d; ++a) outer *= r.size();
  for (int a = 0; a + 1 < m; ++a) outer *= nz;
  double total = 0.0;
#pragma omp parallel reduction(+ : total)
  {
    std::vector<double> x(n);
#pragma omp for schedule(dynamic)
    for (std::size_t k = 0; k < outer; ++k) {
      std::size_t rem = k;
      double w = 1.0;
      std::fill(x.begin(), x.end(), 0.0);
      for (int a = m - 2; a >= 0; --a) {
        const int i = static_cast<int>(rem % nz);
        rem /= nz;
        x[q + a] = -p.center_half_width + i * p.center_step;
        w *= (i == 0 || i == nz - 1) ? 0.5 * p.center_step : p.center_step;
      }
      for (int a = d - 1; a >= 0; --a) {
        const std::size_t i = rem % r.size();
        rem /= r.size();
        for (int c = 0; c < q; ++c) x[c] += r.nodes[i] * basis[a][c];
        w *= r.weights[i];
      }
      if (m == 0) {
        total += w * engine.eval(1.0, x);
        continue;
      }
      const auto col = engine.eval_column(1.0, std::span<const double>(x.data(), n - 1),
                                          -p.center_half_width, p.center_step, nz,
                                          KernelSymbol::heat());
      double s = 0.0;
      for (int i = 0; i < nz; ++i) s += (i == 0 || i == nz - 1 ? 0.5 : 1.0) * col[i];
      total += w * s * p.center_step;
    }
  }
  return total;
}

PhiBounds phi_bounds(const BoundFit& fit, int n) {
  // integrals of c^{-1} e^{-c|x|^2} and c e^{-|x|^2/c} over R^{n-1}
  const double cl = fit.c_lower, cu = fit.c_upper;
  return {std::pow(std::numbers::pi / cl, 0.5 * (n - 1)) / cl,
          cu * std::pow(std::numbers::pi * cu, 0.5 * (n - 1))};
}

double c_G(const KernelEngine& engine, const KernelBoxParams& box) {
  const GroupSpec& spec = engine.group();
  const int q = spec.horizontal_dim();
  std::vector<KernelSymbol> syms;
  for (int i = 0; i < q; ++i) syms.push_back(KernelSymbol::left(i));
  const auto r = kernel_box_integrals(engine, 1.0, kernel_box(spec, 1.0, box), syms, 1,
                                      [](auto, std::span<const double> g, std::span<double> acc) {
                                        acc[0] = norm(g);
                                      });
  return r[0];
}

FunctionalValue de_giorgi_functional(const GridFunction& f, double t, const KernelEngine& engine,
                                     const DeGiorgiOptions& opt) {
  const GroupSpec& spec = engine.group();
  const int q = spec.horizontal_dim();
  FunctionalValue out;
  HorizontalVectorField v;
  if (opt.gradient == GradientPath::KernelDerivative) {
    v.defined.assign(f.size(), 1);
    for (int i = 0; i < q; ++i) {
      auto r = convolve(f, t, engine, KernelSymbol::left(i), opt.convolution);
      out.tail += r.tail_estimate;
      v.components.push_back(std::move(r.values));
    }
  } else {
    auto r = convolve(f, t, engine, KernelSymbol::heat(), opt.convolution);
    out.tail += r.tail_estimate;
    v = horizontal_gradient(r.values, spec);
    out.tail += v.excluded_mass;
  }
  out.value = l1_norm(v);
  return out;
}

HalfHeatValue half_heat_functional(const RegionSpec& E, double t, const KernelEngine& engine,
                                   const SubstitutionParams& p) {
  return half_heat_functional(E, t, engine, heat_rule(engine, p.rule), p.base_cells);
}

HalfHeatValue half_heat_functional(const RegionSpec& E, double t, const KernelEngine& engine,
                                   const HeatRule& rule, int base_cells) {
  if (!(t > 0.0)) throw std::domain_error("time must be positive");
  const GroupSpec& spec = engine.group();
  const int n = spec.dim();
  check_substitution_group(spec);
  if (E.dim() != n) throw DimensionError("region and group dimensions differ");
  if (!E.bounded()) throw std::invalid_argument("half-heat functional needs a bounded region");
  if (n < 2) throw DimensionError("substitution path needs n >= 2");
  std::vector<double> lo(n), hi(n);
  E.bounds(lo, hi);
  const BaseGrid base = midpoint_grid(std::span<const double>(lo).first(n - 1),
                                      std::span<const double>(hi).first(n - 1), base_cells);
  const double st = std::sqrt(t);
  std::vector<std::vector<Interval>> own(base.size());
  for (std::size_t b = 0; b < base.size(); ++b) E.column(base.node(b), own[b]);

  double A = 0.0, B = 0.0;
#pragma omp parallel reduction(+ : A, B)
  {
    std::vector<double> v(n), vinv(n), y(n), u(n), yy(n);
    std::vector<Interval> I, J;
#pragma omp for schedule(dynamic)
    for (std::size_t k = 0; k < rule.size(); ++k) {
      spec.dilate_into(st, rule.node(k).data(), v.data());
      for (int a = 0; a < n; ++a) vinv[a] = -v[a];
      double a_sum = 0.0, b_sum = 0.0;
      for (std::size_t b = 0; b < base.size(); ++b) {
        const auto yp = base.node(b);
        // side A: y in E with y o v outside E
        if (!own[b].empty()) {
          std::copy(yp.begin(), yp.end(), y.begin());
          y[n - 1] = 0.0;
          spec.compose_into(y.data(), v.data(), u.data());
          E.column(std::span<const double>(u.data(), n - 1), J);
          for (auto& iv : J) {
            iv.lo -= u[n - 1];
            iv.hi -= u[n - 1];
          }
          a_sum += difference_length(own[b], J);
        }
        // side B: y outside E with y o v in E, indexed by u' = (y o v)'
        if (!own[b].empty()) {
          std::copy(yp.begin(), yp.end(), u.begin());
          u[n - 1] = 0.0;
          spec.compose_into(u.data(), vinv.data(), yy.data());
          yy[n - 1] = 0.0;
          spec.compose_into(yy.data(), v.data(), y.data());
          J = own[b];
          for (auto& iv : J) {
            iv.lo -= y[n - 1];
            iv.hi -= y[n - 1];
          }
          E.column(std::span<const double>(yy.data(), n - 1), I);
          b_sum += difference_length(J, I);
        }
      }
      A += rule.weights[k] * a_sum;
      B += rule.weights[k] * b_sum;
    }
  }
  A *= base.cell;
  B *= base.cell;
  HalfHeatValue r;
  r.value = A / (2.0 * st);
  r.complement = B / (2.0 * st);
  r.symmetric = (A + B) / (4.0 * st);
  r.tail = std::abs(1.0 - rule.mass) * E.volume() / (2.0 * st);
  return r;
}

HalfHeatValue half_heat_grid(const GridFunction& chi, double t, const KernelEngine& engine,
                             const ConvolutionOptions& opt) {
  const auto w = convolve(chi, t, engine, KernelSymbol::heat(), opt);
  const GridSpec& g = chi.grid();
  double outside = 0.0, inside = 0.0, sym = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double wk = g.weight(k);
    if (chi[k] < 0.5)
      outside += wk * w.values[k];
    else
      inside += wk * (1.0 - w.values[k]);
    sym += wk * std::abs(w.values[k] - chi[k]);
  }
  const double st = std::sqrt(t);
  HalfHeatValue r;
  r.value = outside / (2.0 * st);
  r.complement = inside / (2.0 * st);
  r.symmetric = sym / (4.0 * st);
  r.tail = w.tail_estimate / (2.0 * st);
  return r;
}

namespace {

template <class Eval>
FunctionalValue ledoux_sum(const GridSpec& g, double t, const GroupSpec& spec, const HeatRule& rule,
                           Eval&& f) {
  if (!(t > 0.0)) throw std::domain_error("time must be positive");
  const int n = spec.dim();
  if (g.dim() != n || rule.n != n) throw DimensionError("ledoux dimensions differ");
  std::vector<double> fx(g.size());
  {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, x);
      fx[i] = f(static_cast<long>(i), x);
    }
  }
  const double st = std::sqrt(t);
  double total = 0.0, outside = 0.0;
#pragma omp parallel reduction(+ : total, outside)
  {
    std::vector<double> x(n), v(n), vinv(n), y(n);
#pragma omp for schedule(dynamic)
    for (std::size_t k = 0; k < rule.size(); ++k) {
      spec.dilate_into(st, rule.node(k).data(), v.data());
      for (int a = 0; a < n; ++a) vinv[a] = -v[a];
      double s = 0.0, o = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        g.point(i, x);
        const double w = g.weight(i);
        spec.compose_into(x.data(), vinv.data(), y.data());
        s += w * std::abs(fx[i] - f(-1, y));
        // x o v leaves the box: the partner term of the zero extension
        spec.compose_into(x.data(), v.data(), y.data());
        bool out = false;
        for (int a = 0; a < n; ++a) out = out || y[a] < g.lo[a] || y[a] > g.hi[a];
        if (out) o += w * std::abs(fx[i]);
      }
      total += rule.weights[k] * s;
      outside += rule.weights[k] * o;
    }
  }
  FunctionalValue r;
  r.value = (total + outside) / (4.0 * st);
  double l1 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) l1 += g.weight(i) * std::abs(fx[i]);
  r.tail = std::abs(1.0 - rule.mass) * 2.0 * l1 / (4.0 * st);
  return r;
}

}  // namespace

FunctionalValue ledoux_functional(const GridFunction& f, double t, const KernelEngine& engine,
                                  const HeatRule& rule) {
  return ledoux_sum(f.grid(), t, engine.group(), rule, [&](long i, std::span<const double> x) {
    return i >= 0 ? f[static_cast<std::size_t>(i)] : f.interpolate(x);
  });
}

FunctionalValue ledoux_functional(const std::function<double(std::span<const double>)>& f,
                                  const GridSpec& grid, double t, const KernelEngine& engine,
                                  const HeatRule& rule) {
  return ledoux_sum(grid, t, engine.group(), rule,
                    [&](long, std::span<const double> x) { return f(x); });
}

PerimeterBoundReport perimeter_bound_check(const RegionSpec& E, std::span<const double> ts,
                            const KernelEngine& engine, double cG, const SubstitutionParams& p,
                            const SurfaceParams& surface) {
  PerimeterBoundReport r;
  r.c_G = cG;
  r.perimeter = perimeter_smooth(E, engine.group(), surface);
  const HeatRule rule = heat_rule(engine, p.rule);
  const double bound = cG * r.perimeter;
  for (double t : ts) {
    const auto h = half_heat_functional(E, t, engine, rule, p.base_cells);
    const double err = 0.5 * std::abs(h.value - h.complement) + h.tail;
    r.ts.push_back(t);
    r.lhs.push_back(h.symmetric);
    r.errors.push_back(err);
    r.ratio.push_back(h.symmetric / r.perimeter);
    r.slack.push_back(1.0 - h.symmetric / bound);
    if (h.symmetric + err > bound) r.holds = false;
  }
  return r;
}

CoareaReport coarea_check(const ScalarField& f, const GridSpec& grid,
                          const std::function<RegionSpec(double)>& levels, double tau_lo,
                          double tau_hi, const GroupSpec& spec, int tau_nodes,
                          const SurfaceParams& surface) {
  if (!(tau_hi > tau_lo)) throw std::invalid_argument("empty level range");
  CoareaReport r;
  r.gradient_side = l1_norm(horizontal_gradient(f, grid, spec));
  const int panels = std::max(1, tau_nodes / 8);
  const Rule1D rule = composite_gauss_legendre(panels, 8, tau_lo, tau_hi);
  for (std::size_t k = 0; k < rule.size(); ++k)
    r.level_side += rule.weights[k] * perimeter_smooth(levels(rule.nodes[k]), spec, surface);
  const double scale = std::max(std::abs(r.gradient_side), std::abs(r.level_side));
  r.relative_gap = scale > 0.0 ? std::abs(r.gradient_side - r.level_side) / scale : 0.0;
  return r;
}

BlowupValue blowup_distance(const RegionSpec& E, std::span<const double> x0, double r,
                            const GroupSpec& spec, const BlowupParams& p) {
  const int n = spec.dim();
  if (!(r > 0.0)) throw std::domain_error("blow-up scale must be positive");
  if (static_cast<int>(x0.size()) != n || E.dim() != n) throw DimensionError("blow-up dimensions");
  check_substitution_group(spec);
  BlowupValue out;
  out.nu = horizontal_normal(E, x0, spec);
  const double m = norm(out.nu);
  if (m < 1e-12) throw std::domain_error("characteristic boundary point: horizontal normal vanishes");
  for (double& c : out.nu) c /= m;
  const RegionSpec S = RegionSpec::vertical_halfspace(out.nu, n);
  std::vector<double> lo(n - 1, -p.window), hi(n - 1, p.window);
  const BaseGrid base = midpoint_grid(lo, hi, p.base_cells);
  const Interval window{-p.window, p.window};
  double total = 0.0;
#pragma omp parallel reduction(+ : total)
  {
    std::vector<double> y(n), d(n), p0(n), p1(n);
    std::vector<Interval> I, H, a, b;
    auto clip = [&](std::vector<Interval>& v, std::vector<Interval>& out) {
      out.clear();
      for (const auto& iv : v) {
        const double l = std::max(iv.lo, window.lo), h = std::min(iv.hi, window.hi);
        if (h > l) out.push_back({l, h});
      }
    };
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < base.size(); ++k) {
      const auto yp = base.node(k);
      std::copy(yp.begin(), yp.end(), y.begin());
      // x0 o D(r)(y', s) is affine in s along the last axis
      y[n - 1] = 0.0;
      spec.dilate_into(r, y.data(), d.data());
      spec.compose_into(x0.data(), d.data(), p0.data());
      y[n - 1] = 1.0;
      spec.dilate_into(r, y.data(), d.data());
      spec.compose_into(x0.data(), d.data(), p1.data());
      const double slope = p1[n - 1] - p0[n - 1];
      E.column(std::span<const double>(p0.data(), n - 1), I);
      for (auto& iv : I) {
        iv.lo = (iv.lo - p0[n - 1]) / slope;
        iv.hi = (iv.hi - p0[n - 1]) / slope;
      }
      S.column(yp, H);
      clip(I, a);
      clip(H, b);
      total += difference_length(a, b) + difference_length(b, a);
    }
  }
  out.distance = total * base.cell;
  return out;
}

VariationReport make_variation_report(std::vector<double> ts, std::vector<double> values,
                                      std::vector<double> tails, double reference, int degree,
                                      double fit_exponent) {
  VariationReport r;
  r.limit = richardson(ts, values, degree, fit_exponent);
  r.ts = std::move(ts);
  r.values = std::move(values);
  r.tails = std::move(tails);
  r.reference = reference;
  r.ratio = reference != 0.0 ? r.limit.limit / reference : 0.0;
  return r;
}

}  // namespace carnot
