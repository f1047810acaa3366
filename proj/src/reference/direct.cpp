#include <vector>

#include "carnot/convolution.hpp"
#include "carnot/errors.hpp"

// Plain serial double loop with pointwise kernel evaluation: no truncation,
// no batching, no transforms.
namespace carnot::reference {

GridFunction direct(const GridFunction& f, double t, const KernelEngine& engine,
                    const KernelSymbol& symbol) {
  const GroupSpec& spec = engine.group();
  const GridSpec& g = f.grid();
  const int n = spec.dim();
  if (g.dim() != n) throw DimensionError("grid dimension does not match group");
  GridFunction out(g);
  std::vector<double> x(n), y(n), z(n), yinv(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    double acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (f[k] == 0.0) continue;
      g.point(k, y);
      for (int a = 0; a < n; ++a) yinv[a] = -y[a];
      spec.compose_into(yinv.data(), x.data(), z.data());
      acc += g.weight(k) * engine.eval(t, z, symbol) * f[k];
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace carnot::reference
