#include "carnot/semigroup.hpp"

#include <cmath>
#include <stdexcept>

#include "carnot/errors.hpp"

namespace carnot {

double HorizontalVectorField::norm_at(std::size_t k) const {
  double s = 0.0;
  for (const auto& c : components) s += c[k] * c[k];
  return std::sqrt(s);
}

GridFunction apply_heat(const GridFunction& f, double t, const KernelEngine& engine,
                        const ConvolutionOptions& opt) {
  return convolve(f, t, engine, KernelSymbol::heat(), opt).values;
}

HorizontalVectorField horizontal_gradient(const GridFunction& f, const GroupSpec& spec) {
  const GridSpec& g = f.grid();
  const int n = spec.dim(), q = spec.horizontal_dim();
  if (g.dim() != n) throw DimensionError("grid dimension does not match group");
  const CoeffTables tab = derive_coeff_tables(spec);
  HorizontalVectorField v;
  v.components.assign(q, GridFunction(g));
  v.defined.assign(g.size(), 0);
  double excluded = 0.0;
#pragma omp parallel reduction(+ : excluded)
  {
    std::vector<int> idx(n);
    std::vector<double> x(n), d(n);
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < g.size(); ++k) {
      g.index(k, idx);
      bool inner = true;
      for (int a = 0; a < n; ++a) inner = inner && idx[a] >= 2 && idx[a] <= g.shape[a] - 3;
      if (!inner) {
        excluded += g.weight(k) * std::abs(f[k]);
        continue;
      }
      v.defined[k] = 1;
      g.point(k, x);
      for (int a = 0; a < n; ++a) {
        const std::size_t s = g.stride(a);
        d[a] = (-f[k + 2 * s] + 8.0 * f[k + s] - 8.0 * f[k - s] + f[k - 2 * s]) /
               (12.0 * g.spacing(a));
      }
      for (int i = 0; i < q; ++i) {
        double c = d[i];
        for (int kk = q; kk < n; ++kk) c += tab.left_coeff(i, kk, x) * d[kk];
        v.components[i][k] = c;
      }
    }
  }
  v.excluded_mass = excluded;
  return v;
}

HorizontalVectorField horizontal_gradient(const ScalarField& f, const GridSpec& grid,
                                          const GroupSpec& spec) {
  const int n = spec.dim(), q = spec.horizontal_dim();
  if (grid.dim() != n) throw DimensionError("grid dimension does not match group");
  HorizontalVectorField v;
  v.components.assign(q, GridFunction(grid));
  v.defined.assign(grid.size(), 1);
#pragma omp parallel
  {
    std::vector<double> x(n), d(n);
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      grid.point(k, x);
      f.gradient(x, d);
      for (int i = 0; i < q; ++i) v.components[i][k] = left_field_from_gradient(i, d, x, spec);
    }
  }
  return v;
}

double l1_norm(const HorizontalVectorField& v) {
  if (v.components.empty()) return 0.0;
  const GridSpec& g = v.components.front().grid();
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (v.defined[k]) s += g.weight(k) * v.norm_at(k);
  return s;
}

double l1_norm(const GridFunction& f) { return f.l1(); }

namespace {

template <class Eval>
ShiftL1 shift_l1(const GridSpec& g, const GroupPoint& z, double t, const GroupSpec& spec,
                 Eval&& eval) {
  if (!(t > 0.0)) throw std::domain_error("shift scale must be positive");
  const int n = spec.dim();
  if (static_cast<int>(z.size()) != n || g.dim() != n) throw DimensionError("shift dimension");
  std::vector<double> dz(n);
  spec.dilate_into(t, z.coords().data(), dz.data());
  double acc = 0.0, tail = 0.0;
#pragma omp parallel reduction(+ : acc, tail)
  {
    std::vector<double> x(n), y(n);
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < g.size(); ++k) {
      g.point(k, x);
      spec.compose_into(x.data(), dz.data(), y.data());
      bool out = false;
      for (int a = 0; a < n; ++a) out = out || y[a] < g.lo[a] || y[a] > g.hi[a];
      const double fx = eval(k, x), fy = eval(-1, y);
      if (out) tail += g.weight(k) * std::abs(fx);
      acc += g.weight(k) * std::abs(fy - fx);
    }
  }
  return {acc / t, tail};
}

}  // namespace

ShiftL1 group_shift_l1(const GridFunction& f, const GroupPoint& z, double t, const GroupSpec& spec) {
  return shift_l1(f.grid(), z, t, spec, [&](long k, const std::vector<double>& x) {
    return k >= 0 ? f[static_cast<std::size_t>(k)] : f.interpolate(x);
  });
}

ShiftL1 group_shift_l1(const ScalarField& f, const GridSpec& grid, const GroupPoint& z, double t,
                       const GroupSpec& spec) {
  return shift_l1(grid, z, t, spec,
                  [&](long, const std::vector<double>& x) { return f.value(x); });
}

}  // namespace carnot
