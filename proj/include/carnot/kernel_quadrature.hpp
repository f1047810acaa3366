#pragma once

#include <functional>
#include <span>
#include <vector>

#include "carnot/grid.hpp"
#include "carnot/heat_kernel.hpp"

namespace carnot {

// Trapezoid integrals over a box of pointwise functionals of kernel values.
// At every node `f(z, g, acc)` receives the values g[s] of syms[s] at (t, z)
// and adds its contributions into acc (size `outputs`); the returned vector
// holds the weighted sums. Kernel values come column by column along the
// last axis.
using KernelNodeFn =
    std::function<void(std::span<const double> z, std::span<const double> g, std::span<double> acc)>;

std::vector<double> kernel_box_integrals(const KernelEngine& engine, double t, const GridSpec& box,
                                         std::span<const KernelSymbol> syms, int outputs,
                                         const KernelNodeFn& f);

// Cubature for integrals against h(1, w) dw:
//   int g(w) h(1, w) dw ~ sum_k weights[k] g(nodes[k]).
// Polar in the first layer when q = 2, tensor Gauss-Legendre otherwise;
// composite Gauss-Legendre in the centre. Monte Carlo engines use their
// cached draws with equal weights instead.
struct HeatRuleParams {
  int radial = 12;
  int angular = 16;
  double radius = 9.0;
  int center_panels = 6;
  int center_order = 8;
  double center_half_width = 10.0;
  // nodes whose weight is below drop * max weight are discarded
  double drop = 1e-10;
  // Monte Carlo engines: number of draws used
  std::size_t draws = 4096;
};

struct HeatRule {
  int n = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  // sum of weights, ~1
  double mass = 0.0;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t k) const {
    return {nodes.data() + k * n, static_cast<std::size_t>(n)};
  }
};

HeatRule heat_rule(const KernelEngine& engine, const HeatRuleParams& p = {});

// Box [-a t^{1/2}, a t^{1/2}]^q x [-b t, b t]^{n-q} resolving h(t, .).
struct KernelBoxParams {
  double first_half_width = 9.0;
  double center_half_width = 24.0;
  int first_points = 73;
  int center_points = 193;
};

GridSpec kernel_box(const GroupSpec& spec, double t, const KernelBoxParams& p = {});

}  // namespace carnot
