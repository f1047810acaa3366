#include "carnot/commutator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "carnot/errors.hpp"

namespace carnot {

namespace {

void check_kernel(const GroupSpec& spec, const CommutatorKernel& G) {
  const int q = spec.horizontal_dim();
  if (G.i < 0 || G.i >= q || G.j < 0 || G.j >= q)
    throw DimensionError("commutator kernel indices must be first-layer");
}

}  // namespace

double eval_G(const KernelEngine& engine, const CommutatorKernel& G, double t,
              std::span<const double> z) {
  check_kernel(engine.group(), G);
  return engine.eval(t, z, G.symbol());
}

double reconstruction_residual(const KernelEngine& engine, int i, double t,
                               std::span<const GroupPoint> lattice, double step) {
  const GroupSpec& spec = engine.group();
  const CoeffTables& tab = engine.tables();
  const int n = spec.dim(), q = spec.horizontal_dim();
  check_kernel(spec, {i, 0});
  double worst = 0.0, scale = 0.0;
  std::vector<double> y(n);
  for (const auto& z : lattice) {
    // X_k^R = d_k on the centre and X_k^R c_i^k = 0, so the left side is sum c_i^k d_k h
    double lhs = 0.0;
    for (int k = q; k < n; ++k)
      lhs += tab.c_coeff(i, k, z.coords()) * engine.eval(t, z.coords(), KernelSymbol::partial(k));
    double rhs = 0.0;
    for (int j = 0; j < q; ++j) {
      // X_j^R g(z) = d/ds g(exp(s X_j) o z) at s = 0
      const KernelSymbol s = KernelSymbol::commutator(i, j);
      std::vector<double> e(n, 0.0);
      auto val = [&](double h) {
        e[j] = h;
        spec.compose_into(e.data(), z.coords().data(), y.data());
        return engine.eval(t, y, s);
      };
      rhs += (-val(2 * step) + 8 * val(step) - 8 * val(-step) + val(-2 * step)) / (12 * step);
    }
    worst = std::max(worst, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(lhs));
  }
  return scale > 0.0 ? worst / scale : worst;
}

GPropertyReport check_G_properties(const KernelEngine& engine, const CommutatorKernel& G,
                                   std::span<const double> ts, const GPropertyParams& p) {
  const GroupSpec& spec = engine.group();
  check_kernel(spec, G);
  GPropertyReport r;
  r.i = G.i;
  r.j = G.j;
  r.derivative_path = engine.analytic_derivatives() ? "analytic" : "finite-difference";
  const KernelSymbol sym = G.symbol();
  const double R2 = p.tail_radius * p.tail_radius;
  // radial histogram of |G(1, .)| in shells of width kShell
  constexpr double kShell = 0.25;
  auto unit_pass = [&](double t, bool histogram) {
    const GridSpec box = kernel_box(spec, t, p.box);
    double rmax = 0.0;
    for (int a = 0; a < box.dim(); ++a) rmax += box.hi[a] * box.hi[a];
    const int shells = histogram ? static_cast<int>(std::sqrt(rmax) / kShell) + 1 : 0;
    return kernel_box_integrals(
        engine, t, box, std::span<const KernelSymbol>(&sym, 1), 3 + shells,
        [&](std::span<const double> z, std::span<const double> g, std::span<double> acc) {
          const double a = std::abs(g[0]);
          acc[0] = g[0];
          acc[1] = a;
          double r2 = 0.0;
          for (double c : z) r2 += c * c;
          acc[2] = r2 > R2 ? a : 0.0;
          if (shells > 0) acc[3 + std::min(shells - 1, static_cast<int>(std::sqrt(r2) / kShell))] = a;
        });
  };
  auto tail_stats = [&](const std::vector<double>& v) {
    r.tail_fraction = v[1] > 0.0 ? v[2] / v[1] : 0.0;
    double tail = 0.0;
    const int shells = static_cast<int>(v.size()) - 3;
    r.radius_for_tolerance = shells * kShell;
    for (int s = shells - 1; s >= 0; --s) {
      tail += v[3 + s];
      if (tail > p.tail_tolerance * v[1]) break;
      r.radius_for_tolerance = s * kShell;
    }
  };
  bool have_unit = false;
  for (double t : ts) {
    const bool unit = t == 1.0;
    const auto v = unit_pass(t, unit);
    r.ts.push_back(t);
    r.integral.push_back(v[0]);
    r.abs_integral.push_back(v[1]);
    if (unit) {
      tail_stats(v);
      have_unit = true;
    }
  }
  if (!have_unit) tail_stats(unit_pass(1.0, true));
  const auto [lo, hi] = std::minmax_element(r.abs_integral.begin(), r.abs_integral.end());
  for (std::size_t k = 0; k < r.ts.size(); ++k)
    if (r.abs_integral[k] > 0.0)
      r.zero_mean = std::max(r.zero_mean, std::abs(r.integral[k]) / r.abs_integral[k]);
  r.abs_spread = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  r.zero_mean_ok = r.zero_mean <= p.tolerance;
  r.constant_ok = r.abs_spread <= p.tolerance;
  r.tail_ok = r.tail_fraction <= p.tail_tolerance;
  return r;
}

ConvolutionResult mu_t(int i, const HorizontalVectorField& grad, double t,
                       const KernelEngine& engine, const ConvolutionOptions& opt) {
  const GroupSpec& spec = engine.group();
  const int q = spec.horizontal_dim();
  check_kernel(spec, {i, 0});
  if (grad.size() != q) throw DimensionError("gradient field must have q components");
  ConvolutionResult out;
  out.values = GridFunction(grad.components.front().grid());
  for (int j = 0; j < q; ++j) {
    const auto r = convolve(grad.components[j], t, engine, KernelSymbol::commutator(i, j), opt);
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += r.values[k];
    out.tail_estimate += r.tail_estimate;
    out.path = r.path;
  }
  return out;
}

ConvolutionResult mu_t(int i, const GridFunction& f, double t, const KernelEngine& engine,
                       const ConvolutionOptions& opt) {
  return mu_t(i, horizontal_gradient(f, engine.group()), t, engine, opt);
}

ResidualReport commutator_residual(int i, const GridFunction& f, double t,
                                   const KernelEngine& engine, const ConvolutionOptions& opt) {
  const GroupSpec& spec = engine.group();
  check_kernel(spec, {i, 0});
  ResidualReport r;
  const auto w = convolve(f, t, engine, KernelSymbol::heat(), opt);
  const auto lhs = horizontal_gradient(w.values, spec);
  const auto grad = horizontal_gradient(f, spec);
  const auto wx = convolve(grad.components[i], t, engine, KernelSymbol::heat(), opt);
  const auto mu = mu_t(i, grad, t, engine, opt);
  const GridSpec& g = f.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!lhs.defined[k]) continue;
    r.residual += g.weight(k) * std::abs(lhs.components[i][k] - wx.values[k] - mu.values[k]);
  }
  r.gradient_l1 = l1_norm(grad);
  r.mu_l1 = mu.values.l1();
  r.tail = w.tail_estimate + wx.tail_estimate + mu.tail_estimate;
  return r;
}

}  // namespace carnot
