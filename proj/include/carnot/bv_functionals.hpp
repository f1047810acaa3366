#pragma once

#include <functional>
#include <span>
#include <vector>

#include "carnot/convolution.hpp"
#include "carnot/grid.hpp"
#include "carnot/group.hpp"
#include "carnot/heat_kernel.hpp"
#include "carnot/kernel_quadrature.hpp"
#include "carnot/quadrature.hpp"
#include "carnot/region.hpp"

namespace carnot {

// Horizontal projection v of the inner unit normal at a boundary point,
// v_i = sum_j q_i^j n_j.
std::vector<double> horizontal_normal(const RegionSpec& E, std::span<const double> x,
                                      const GroupSpec& spec);

// P_G(E) = int_{dE} |v| dH^{n-1}. Halfspaces are restricted to the window.
double perimeter_smooth(const RegionSpec& E, const GroupSpec& spec, const SurfaceParams& p = {});
// int_{dE} weight(v / |v|) |v| dH^{n-1}; characteristic points contribute 0.
double perimeter_weighted(const RegionSpec& E, const GroupSpec& spec,
                          const std::function<double(std::span<const double>)>& weight,
                          const SurfaceParams& p = {});

struct PhiParams {
  // Gauss-Legendre nodes per in-plane first-layer direction on [-a, a]
  int order = 48;
  double half_width = 12.0;
  // trapezoid along centre directions
  double center_half_width = 30.0;
  double center_step = 0.05;
};

// phi_G(nu) = int over {<pi x, nu> = 0} of h(1, x).
double phi_G(std::span<const double> nu, const KernelEngine& engine, const PhiParams& p = {});

struct PhiBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Range of phi_G implied by Gaussian bounds with constants fit on R^n.
PhiBounds phi_bounds(const BoundFit& fit, int n);

// c_G = int |grad_X h(1, z)| dz.
double c_G(const KernelEngine& engine, const KernelBoxParams& box = {});

struct FunctionalValue {
  double value = 0.0;
  // truncation / excluded-mass contribution, in the units of value
  double tail = 0.0;
};

enum class GradientPath {
  // X_i (f * h_t) = f * (X_i h_t)
  KernelDerivative,
  // 4th-order differences of the grid function W_t f
  Stencil,
};

struct DeGiorgiOptions {
  GradientPath gradient = GradientPath::KernelDerivative;
  ConvolutionOptions convolution{};
};

// || grad_X W_t f ||_1
FunctionalValue de_giorgi_functional(const GridFunction& f, double t, const KernelEngine& engine,
                                     const DeGiorgiOptions& opt = {});

struct SubstitutionParams {
  HeatRuleParams rule{};
  // midpoint cells per base axis
  int base_cells = 128;
};

struct HalfHeatValue {
  // (1 / (2 sqrt t)) int_{E^c} W_t chi_E
  double value = 0.0;
  // (1 / (4 sqrt t)) int |W_t chi_E - chi_E|, assembled from both sides
  double symmetric = 0.0;
  // (1 / (2 sqrt t)) int_E W_t chi_{E^c}
  double complement = 0.0;
  // 1 - mass of the heat cubature, scaled like value
  double tail = 0.0;
};

// Substitution form int_{E^c} W_t chi_E = int h(1,w) |{y in E : y o D(sqrt t) w notin E}| dw
// with exact column lengths along the last axis. E bounded; last axis in the centre
// (or any axis for abelian groups).
HalfHeatValue half_heat_functional(const RegionSpec& E, double t, const KernelEngine& engine,
                                   const SubstitutionParams& p = {});
HalfHeatValue half_heat_functional(const RegionSpec& E, double t, const KernelEngine& engine,
                                   const HeatRule& rule, int base_cells);

// Grid form of the same quantities from a computed W_t chi_E. Returns value and
// symmetric; complement is int_E (1 - W_t chi_E) / (2 sqrt t).
HalfHeatValue half_heat_grid(const GridFunction& chi, double t, const KernelEngine& engine,
                             const ConvolutionOptions& opt);

// (1/(4 sqrt t)) int dx int h(1,w) |f(x) - f(x o D(sqrt t) w^{-1})| dw.
FunctionalValue ledoux_functional(const GridFunction& f, double t, const KernelEngine& engine,
                                  const HeatRule& rule);
// Same for an analytic f with the x-integral on the trapezoid nodes of `grid`.
FunctionalValue ledoux_functional(const std::function<double(std::span<const double>)>& f,
                                  const GridSpec& grid, double t, const KernelEngine& engine,
                                  const HeatRule& rule);

struct PerimeterBoundReport {
  double c_G = 0.0;
  double perimeter = 0.0;
  std::vector<double> ts;
  // (1/(4 sqrt t)) int |W_t chi_E - chi_E|
  std::vector<double> lhs;
  std::vector<double> errors;
  // lhs / P_G(E)
  std::vector<double> ratio;
  // 1 - lhs / (c_G P_G(E))
  std::vector<double> slack;
  bool holds = true;
};

PerimeterBoundReport perimeter_bound_check(const RegionSpec& E, std::span<const double> ts,
                            const KernelEngine& engine, double cG, const SubstitutionParams& p = {},
                            const SurfaceParams& surface = {});

struct CoareaReport {
  // int |grad_X f|
  double gradient_side = 0.0;
  // int P_G(E_tau) d tau
  double level_side = 0.0;
  double relative_gap = 0.0;
};

// Level sets supplied analytically: levels(tau) = {f > tau}, tau in (lo, hi).
CoareaReport coarea_check(const ScalarField& f, const GridSpec& grid,
                          const std::function<RegionSpec(double)>& levels, double tau_lo,
                          double tau_hi, const GroupSpec& spec, int tau_nodes = 48,
                          const SurfaceParams& surface = {});

struct BlowupParams {
  double window = 1.0;
  int base_cells = 256;
};

struct BlowupValue {
  double distance = 0.0;
  std::vector<double> nu;
};

// |(D(1/r)(x0^{-1} o E) symmetric-difference S_G^+(nu_E(x0))) inside [-w, w]^n|.
BlowupValue blowup_distance(const RegionSpec& E, std::span<const double> x0, double r,
                            const GroupSpec& spec, const BlowupParams& p = {});

struct VariationReport {
  std::vector<double> ts;
  std::vector<double> values;
  std::vector<double> tails;
  Extrapolation limit;
  double reference = 0.0;
  double ratio = 0.0;
};

// fit_exponent 1 suits smooth f, where W_t f - f = O(t)
VariationReport make_variation_report(std::vector<double> ts, std::vector<double> values,
                                      std::vector<double> tails, double reference, int degree = 2,
                                      double fit_exponent = 0.5);

}  // namespace carnot
