#include "carnot/convolution.hpp"

#include <stdexcept>

#include "carnot/errors.hpp"

namespace carnot {

std::string to_string(ConvolutionPath p) {
  switch (p) {
    case ConvolutionPath::Auto: return "auto";
    case ConvolutionPath::CentralFourier: return "central-fourier";
    case ConvolutionPath::Separable: return "separable";
    case ConvolutionPath::Direct: return "direct";
    case ConvolutionPath::Sampled: return "sampled";
  }
  return "unknown";
}

ConvolutionResult convolve(const GridFunction& f, double t, const KernelEngine& engine,
                           const KernelSymbol& symbol, const ConvolutionOptions& opt) {
  if (!(t > 0.0)) throw std::domain_error("time must be positive");
  ConvolutionPath path = opt.path;
  if (path == ConvolutionPath::Auto) {
    if (engine.kind() == EngineKind::EuclideanClosedForm)
      path = ConvolutionPath::Separable;
    else if (engine.has_central_symbol())
      path = ConvolutionPath::CentralFourier;
    else if (engine.kind() == EngineKind::MonteCarloStep2 && symbol.kind == KernelSymbol::Kind::Heat)
      path = ConvolutionPath::Sampled;
    else
      path = ConvolutionPath::Direct;
  }
  switch (path) {
    case ConvolutionPath::CentralFourier: return kernels::central_fourier(f, t, engine, symbol, opt);
    case ConvolutionPath::Separable: return kernels::separable(f, t, engine, symbol, opt);
    case ConvolutionPath::Direct: return kernels::direct(f, t, engine, symbol, opt);
    case ConvolutionPath::Sampled:
      if (symbol.kind != KernelSymbol::Kind::Heat)
        throw std::invalid_argument("sampled convolution only supports the heat kernel");
      return kernels::sampled(f, t, engine, opt);
    case ConvolutionPath::Auto: break;
  }
  throw std::logic_error("unresolved convolution path");
}

}  // namespace carnot
