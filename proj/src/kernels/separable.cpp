#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "carnot/convolution.hpp"
#include "carnot/errors.hpp"

namespace carnot::kernels {

// Abelian groups: the kernel is a product of 1D Gaussians (one factor
// replaced by its derivative for derived kernels); apply axis by axis.
ConvolutionResult separable(const GridFunction& f, double t, const KernelEngine& engine,
                            const KernelSymbol& symbol, const ConvolutionOptions& opt) {
  const GroupSpec& spec = engine.group();
  if (!spec.is_abelian() || engine.kind() != EngineKind::EuclideanClosedForm)
    throw std::invalid_argument("separable path needs the closed-form abelian engine");
  const GridSpec& g = f.grid();
  const int n = spec.dim();
  if (g.dim() != n) throw DimensionError("grid dimension does not match group");
  if (symbol.kind == KernelSymbol::Kind::Commutator)
    return {GridFunction(g), 0.0, ConvolutionPath::Separable};
  const int daxis = symbol.kind == KernelSymbol::Kind::Heat ? -1 : symbol.i;
  const double R = std::sqrt(4.0 * t * (std::log(1.0 / opt.truncation_eps) + 5.0));
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);

  std::vector<double> cur(f.values().begin(), f.values().end()), next(cur.size());
  double mass_in = 0.0, mass_out = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) mass_in += g.weight(k) * f[k];
  for (int a = 0; a < n; ++a) {
    const int N = g.shape[a];
    const double h = g.spacing(a);
    const int reach = std::min(N - 1, static_cast<int>(std::floor(R / h)));
    std::vector<double> ker(2 * reach + 1);
    for (int o = -reach; o <= reach; ++o) {
      const double u = o * h;
      const double v = norm * std::exp(-u * u / (4.0 * t));
      ker[o + reach] = a == daxis ? -u / (2.0 * t) * v : v;
    }
    const std::size_t stride = g.stride(a);
    const std::size_t lines = g.size() / N;
#pragma omp parallel for schedule(static)
    for (std::size_t l = 0; l < lines; ++l) {
      // base index of line l with axis a removed
      const std::size_t outer = l / stride, inner = l % stride;
      const std::size_t base = outer * stride * N + inner;
      for (int i = 0; i < N; ++i) {
        double s = 0.0;
        const int j0 = std::max(0, i - reach), j1 = std::min(N - 1, i + reach);
        for (int j = j0; j <= j1; ++j) {
          const double w = (j == 0 || j == N - 1) ? 0.5 * h : h;
          s += ker[i - j + reach] * w * cur[base + j * stride];
        }
        next[base + i * stride] = s;
      }
    }
    cur.swap(next);
  }
  GridFunction out(g, std::move(cur));
  double tail = 0.0;
  if (daxis < 0) {
    for (std::size_t k = 0; k < out.size(); ++k) mass_out += g.weight(k) * out[k];
    tail = std::abs(mass_in - mass_out);
  }
  if (tail > opt.tail_tolerance) throw TruncationError("convolution tail above tolerance", tail);
  return {std::move(out), tail, ConvolutionPath::Separable};
}

}  // namespace carnot::kernels
