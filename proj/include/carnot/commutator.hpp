#pragma once

#include <span>
#include <string>
#include <vector>

#include "carnot/convolution.hpp"
#include "carnot/grid.hpp"
#include "carnot/heat_kernel.hpp"
#include "carnot/kernel_quadrature.hpp"
#include "carnot/semigroup.hpp"

namespace carnot {

// G_j^i(t, z) = sum_{k >= q} sum_a theta^k_{j a} X_a^R (c_i^k h)(t, z).
struct CommutatorKernel {
  int i = 0;
  int j = 0;
  KernelSymbol symbol() const { return KernelSymbol::commutator(i, j); }
};

double eval_G(const KernelEngine& engine, const CommutatorKernel& G, double t,
              std::span<const double> z);

// max over the lattice of |sum_{k>=q} X_k^R(c_i^k h) - sum_j X_j^R G_j^i| at time t,
// relative to the largest left-hand value. X_j^R G uses 4th-order differences
// with step `step`.
double reconstruction_residual(const KernelEngine& engine, int i, double t,
                               std::span<const GroupPoint> lattice, double step = 1e-3);

struct GPropertyParams {
  KernelBoxParams box{9.0, 20.0, 73, 161};
  double tail_radius = 6.0;
  // zero mean: |int G| <= tol * int |G|; constancy: relative spread of int |G| <= tol;
  // tail: int_{|z| > R} |G| <= tail_tol * int |G| at t = 1
  double tolerance = 1e-3;
  double tail_tolerance = 1e-4;
};

struct GPropertyReport {
  int i = 0;
  int j = 0;
  // "analytic" or "finite-difference"
  std::string derivative_path;
  std::vector<double> ts;
  std::vector<double> integral;
  std::vector<double> abs_integral;
  // int_{|z| > R} |G(1, .)| / int |G(1, .)|
  double tail_fraction = 0.0;
  // smallest radius (on a 0.25 grid) whose tail fraction meets tail_tolerance
  double radius_for_tolerance = 0.0;
  double zero_mean = 0.0;
  double abs_spread = 0.0;
  bool zero_mean_ok = false;
  bool constant_ok = false;
  bool tail_ok = false;
  bool ok() const { return zero_mean_ok && constant_ok && tail_ok; }
};

GPropertyReport check_G_properties(const KernelEngine& engine, const CommutatorKernel& G,
                                   std::span<const double> ts, const GPropertyParams& p = {});

// mu_t^i = sum_j (X_j f) * G_j^i for a gradient field given on the grid.
ConvolutionResult mu_t(int i, const HorizontalVectorField& grad, double t,
                       const KernelEngine& engine, const ConvolutionOptions& opt = {});
ConvolutionResult mu_t(int i, const GridFunction& f, double t, const KernelEngine& engine,
                       const ConvolutionOptions& opt = {});

struct ResidualReport {
  // || X_i W_t f - W_t X_i f - mu_t^i ||_1 over nodes where all terms are defined
  double residual = 0.0;
  // || grad_X f ||_1
  double gradient_l1 = 0.0;
  double mu_l1 = 0.0;
  double tail = 0.0;
};

// All derivatives of grid data by 4th-order differences.
ResidualReport commutator_residual(int i, const GridFunction& f, double t,
                                   const KernelEngine& engine, const ConvolutionOptions& opt = {});

}  // namespace carnot
