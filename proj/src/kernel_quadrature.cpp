#include "carnot/kernel_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "carnot/errors.hpp"
#include "carnot/quadrature.hpp"

namespace carnot {

std::vector<double> kernel_box_integrals(const KernelEngine& engine, double t, const GridSpec& box,
                                         std::span<const KernelSymbol> syms, int outputs,
                                         const KernelNodeFn& f) {
  box.validate();
  const int n = engine.group().dim();
  if (box.dim() != n) throw DimensionError("kernel box dimension mismatch");
  const int ns = static_cast<int>(syms.size());
  const int nc = box.shape[n - 1];
  const std::size_t columns = box.size() / nc;
  std::vector<double> total(outputs, 0.0);
#pragma omp parallel
  {
    std::vector<double> acc(outputs, 0.0), local(outputs), z(n), g(ns);
    std::vector<int> idx(n);
    std::vector<std::vector<double>> cols(ns);
#pragma omp for schedule(dynamic)
    for (std::size_t c = 0; c < columns; ++c) {
      box.index(c * nc, idx);
      for (int a = 0; a < n - 1; ++a) z[a] = box.coord(a, idx[a]);
      for (int s = 0; s < ns; ++s)
        cols[s] = engine.eval_column(t, std::span<const double>(z.data(), n - 1), box.lo[n - 1],
                                     box.spacing(n - 1), nc, syms[s]);
      for (int m = 0; m < nc; ++m) {
        z[n - 1] = box.coord(n - 1, m);
        for (int s = 0; s < ns; ++s) g[s] = cols[s][m];
        std::fill(local.begin(), local.end(), 0.0);
        f(z, g, local);
        const double w = box.weight(c * nc + m);
        for (int o = 0; o < outputs; ++o) acc[o] += w * local[o];
      }
    }
#pragma omp critical
    for (int o = 0; o < outputs; ++o) total[o] += acc[o];
  }
  return total;
}

namespace {

// first-layer nodes and weights (without the kernel factor)
void first_layer_rule(int q, const HeatRuleParams& p, std::vector<double>& pts,
                      std::vector<double>& w) {
  if (q == 2) {
    const Rule1D r = gauss_legendre(p.radial, 0.0, p.radius);
    for (std::size_t i = 0; i < r.size(); ++i)
      for (int k = 0; k < p.angular; ++k) {
        const double th = 2.0 * std::numbers::pi * (k + 0.5) / p.angular;
        pts.push_back(r.nodes[i] * std::cos(th));
        pts.push_back(r.nodes[i] * std::sin(th));
        w.push_back(r.weights[i] * r.nodes[i] * 2.0 * std::numbers::pi / p.angular);
      }
    return;
  }
  const Rule1D r = gauss_legendre(q == 1 ? 2 * p.radial : p.radial, -p.radius, p.radius);
  std::vector<int> idx(q, 0);
  const int m = static_cast<int>(r.size());
  while (true) {
    double wt = 1.0;
    for (int a = 0; a < q; ++a) {
      pts.push_back(r.nodes[idx[a]]);
      wt *= r.weights[idx[a]];
    }
    w.push_back(wt);
    int a = q - 1;
    while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
    if (a < 0) break;
  }
}

}  // namespace

HeatRule heat_rule(const KernelEngine& engine, const HeatRuleParams& p) {
  const GroupSpec& spec = engine.group();
  const int n = spec.dim(), q = spec.horizontal_dim(), m = spec.center_dim();
  HeatRule rule;
  rule.n = n;
  if (engine.kind() == EngineKind::MonteCarloStep2) {
    const auto s = engine.unit_samples();
    const std::size_t count = std::min(p.draws, s.size() / n);
    rule.nodes.assign(s.begin(), s.begin() + count * n);
    rule.weights.assign(count, 1.0 / count);
    rule.mass = 1.0;
    return rule;
  }
  std::vector<double> fp, fw;
  first_layer_rule(q, p, fp, fw);
  const Rule1D c = composite_gauss_legendre(p.center_panels, p.center_order, -p.center_half_width,
                                            p.center_half_width);
  std::size_t center_count = 1;
  for (int a = 0; a < m; ++a) center_count *= c.size();
  const std::size_t total = fw.size() * center_count;
  std::vector<double> nodes(total * n), weights(total);
#pragma omp parallel
  {
    std::vector<double> x(n);
#pragma omp for schedule(dynamic)
    for (std::size_t k = 0; k < total; ++k) {
      const std::size_t f = k / center_count;
      std::size_t r = k % center_count;
      double w = fw[f];
      for (int a = 0; a < q; ++a) x[a] = fp[f * q + a];
      for (int a = m - 1; a >= 0; --a) {
        const std::size_t i = r % c.size();
        r /= c.size();
        x[q + a] = c.nodes[i];
        w *= c.weights[i];
      }
      std::copy(x.begin(), x.end(), nodes.begin() + k * n);
      weights[k] = w * engine.eval(1.0, x);
    }
  }
  const double wmax = *std::max_element(weights.begin(), weights.end());
  for (std::size_t k = 0; k < total; ++k) {
    if (weights[k] < p.drop * wmax) continue;
    rule.nodes.insert(rule.nodes.end(), nodes.begin() + k * n, nodes.begin() + (k + 1) * n);
    rule.weights.push_back(weights[k]);
    rule.mass += weights[k];
  }
  return rule;
}

GridSpec kernel_box(const GroupSpec& spec, double t, const KernelBoxParams& p) {
  if (!(t > 0.0)) throw std::domain_error("time must be positive");
  GridSpec g;
  for (int a = 0; a < spec.dim(); ++a) {
    const bool first = a < spec.horizontal_dim();
    const double w = first ? p.first_half_width * std::sqrt(t) : p.center_half_width * t;
    g.lo.push_back(-w);
    g.hi.push_back(w);
    g.shape.push_back(first ? p.first_points : p.center_points);
  }
  return g;
}

}  // namespace carnot
