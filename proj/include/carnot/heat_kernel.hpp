#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "carnot/group.hpp"
#include "carnot/grid.hpp"

namespace carnot {

enum class EngineKind { EuclideanClosedForm, HeisenbergQuadrature, MonteCarloStep2 };

std::string to_string(EngineKind k);

// A kernel derived from h(t, .):
//   Heat          h
//   Partial(a)    d_a h
//   LeftField(i)  X_i h
//   RightField(i) X_i^R h
//   Commutator    G_j^i = sum_k sum_a theta^k_{j a} X_a^R (c_i^k h)
struct KernelSymbol {
  enum class Kind { Heat, Partial, LeftField, RightField, Commutator };
  Kind kind = Kind::Heat;
  int i = 0;
  int j = 0;

  static KernelSymbol heat() { return {}; }
  static KernelSymbol partial(int a) { return {Kind::Partial, a, 0}; }
  static KernelSymbol left(int i) { return {Kind::LeftField, i, 0}; }
  static KernelSymbol right(int i) { return {Kind::RightField, i, 0}; }
  // G_j^i
  static KernelSymbol commutator(int i, int j) { return {Kind::Commutator, i, j}; }

  // Scaling degree d: g(l^2 t, D(l) z) = l^d g(t, z).
  int degree(const GroupSpec& spec) const;
  std::string describe() const;
};

struct QuadratureParams {
  double rel_tol = 1e-12;
  int max_refinements = 15;
  // Gauss-Legendre order of the panels used for batch (column) evaluation.
  int batch_order = 12;
};

struct MonteCarloParams {
  std::size_t samples = 1'000'000;
  int substeps = 64;
  std::uint64_t seed = 20240601;
  // KDE bandwidths at t = 1 for first-layer and second-layer coordinates. The KDE
  // uses a fourth-order Gaussian kernel, so estimates can dip below zero in the tails.
  double bandwidth = 0.35;
  double center_bandwidth = 0.25;
};

// h and its Euclidean gradient at one point.
struct KernelJet {
  double value = 0.0;
  std::vector<double> grad;
};

struct KernelEstimate {
  double value = 0.0;
  // sampling standard error; 0 for deterministic engines
  double std_error = 0.0;
};

namespace detail {
class EngineImpl;
}

class KernelEngine {
 public:
  static KernelEngine euclidean(const GroupSpec& spec);
  static KernelEngine heisenberg(const GroupSpec& spec, QuadratureParams params = {});
  static KernelEngine monte_carlo(const GroupSpec& spec, MonteCarloParams params);
  // Quadrature engine for standard Heisenberg groups, closed form for abelian ones.
  static KernelEngine best_analytic(const GroupSpec& spec);

  EngineKind kind() const;
  const GroupSpec& group() const;
  const CoeffTables& tables() const;
  std::string describe() const;

  double eval(double t, std::span<const double> x) const;
  double eval(double t, std::span<const double> x, const KernelSymbol& s) const;
  KernelJet jet(double t, std::span<const double> x) const;
  KernelEstimate estimate(double t, std::span<const double> x) const;
  // True when jets come from exact formulas rather than finite differences.
  bool analytic_derivatives() const;

  // Partial Fourier transform in the (one-dimensional) centre,
  //   g^(t, w', lambda) = int g(t, w', z) e^{-i lambda z} dz,
  // available for Heisenberg-type groups (n = q + 1).
  bool has_central_symbol() const;
  std::complex<double> central_symbol(double t, std::span<const double> wprime, double lambda,
                                      const KernelSymbol& s) const;

  // Values g(t, z', z0 + k dz) for k < count along one centre column
  // (batch path of the quadrature engine; falls back to eval otherwise).
  std::vector<double> eval_column(double t, std::span<const double> zprime, double z0, double dz,
                                  int count, const KernelSymbol& s) const;

  const MonteCarloParams* mc_params() const;
  const QuadratureParams* quad_params() const;
  // MC only: cached draws from h(1, .), row-major samples x n.
  std::span<const double> unit_samples() const;

 private:
  explicit KernelEngine(std::shared_ptr<const detail::EngineImpl> impl);
  std::shared_ptr<const detail::EngineImpl> impl_;
};

// Draws from h(t, .) by composing horizontal Gaussian increments.
std::vector<GroupPoint> sample_heat(const GroupSpec& spec, double t, std::size_t count,
                                    int substeps, std::uint64_t seed, std::size_t first_index = 0);
std::vector<GroupPoint> sample_heat(const KernelEngine& engine, double t, std::size_t count);

struct MassReport {
  double mass = 0.0;
  // Gaussian-tail estimate of the mass outside the box
  double tail_estimate = 0.0;
};

MassReport kernel_mass(const KernelEngine& engine, double t, const GridSpec& grid,
                       double tolerance = 1e-2);

struct BoundFit {
  double c_lower = 0.0;
  double c_upper = 0.0;
};

// Smallest c with c^-1 t^{-Q/2} e^{-c|x|^2/t} <= h <= c t^{-Q/2} e^{-|x|^2/(c t)} on the lattice.
BoundFit gaussian_bound_fit(const KernelEngine& engine, std::span<const double> ts,
                            std::span<const GroupPoint> xs, double ceiling = 1e6);

// Smallest c with |g(1, x)| <= c e^{-|x|^2/c} on the lattice.
double derivative_bound_fit(const KernelEngine& engine, const KernelSymbol& s,
                            std::span<const GroupPoint> xs, double ceiling = 1e6);

// Radius outside which the Gaussian upper bound with constant c leaves tail mass below eps.
double truncation_radius(double t, double c, double eps);

}  // namespace carnot
