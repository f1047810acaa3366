#pragma once

#include <limits>
#include <string>

#include "carnot/grid.hpp"
#include "carnot/heat_kernel.hpp"

namespace carnot {

// Group convolution (f * g_t)(x) = int g(t, y^{-1} o x) f(y) dy on a grid whose
// last axis is the centre (for non-abelian groups). f is extended by zero.
enum class ConvolutionPath {
  Auto,
  // first-layer twisted convolution of centre Fourier transforms (Heisenberg type)
  CentralFourier,
  // product of one-dimensional kernels (abelian groups)
  Separable,
  // truncated direct summation over grid pairs
  Direct,
  // Monte Carlo average of f(x o Z^{-1}) over kernel draws
  Sampled,
};

std::string to_string(ConvolutionPath p);

struct ConvolutionOptions {
  ConvolutionPath path = ConvolutionPath::Auto;
  // kernel truncation: pairs beyond truncation_radius(t, 4, eps) are skipped
  double truncation_eps = 1e-15;
  // centre period = pad_factor * box length (CentralFourier)
  int pad_factor = 2;
  // Jackson damping of centre modes; makes the discrete operator positive
  // and mass preserving (for indicator inputs)
  bool positivity_filter = false;
  // Sampled path: number of kernel draws
  std::size_t draws = 4096;
  // error out when the tail estimate exceeds this
  double tail_tolerance = std::numeric_limits<double>::infinity();
};

struct ConvolutionResult {
  GridFunction values;
  // mass that left the box or wrapped around the centre period
  double tail_estimate = 0.0;
  ConvolutionPath path = ConvolutionPath::Auto;
};

ConvolutionResult convolve(const GridFunction& f, double t, const KernelEngine& engine,
                           const KernelSymbol& symbol, const ConvolutionOptions& opt = {});

namespace kernels {

ConvolutionResult central_fourier(const GridFunction& f, double t, const KernelEngine& engine,
                                  const KernelSymbol& symbol, const ConvolutionOptions& opt);
ConvolutionResult separable(const GridFunction& f, double t, const KernelEngine& engine,
                            const KernelSymbol& symbol, const ConvolutionOptions& opt);
ConvolutionResult direct(const GridFunction& f, double t, const KernelEngine& engine,
                         const KernelSymbol& symbol, const ConvolutionOptions& opt);
ConvolutionResult sampled(const GridFunction& f, double t, const KernelEngine& engine,
                          const ConvolutionOptions& opt);

}  // namespace kernels

namespace reference {

// Serial untruncated direct summation; the ground truth for the kernels above.
GridFunction direct(const GridFunction& f, double t, const KernelEngine& engine,
                    const KernelSymbol& symbol);

}  // namespace reference

}  // namespace carnot
