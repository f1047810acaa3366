#include <cmath>
#include <stdexcept>
#include <vector>

#include "carnot/convolution.hpp"
#include "carnot/errors.hpp"

namespace carnot::kernels {

// Columns along the last axis are batched: for fixed first coordinates x', y'
// the kernel argument y^{-1} o x runs through an arithmetic progression in
// the last coordinate (shifted by b(y', x')/2 when that axis is the centre).
ConvolutionResult direct(const GridFunction& f, double t, const KernelEngine& engine,
                         const KernelSymbol& symbol, const ConvolutionOptions& opt) {
  const GroupSpec& spec = engine.group();
  const GridSpec& g = f.grid();
  const int n = spec.dim();
  if (g.dim() != n) throw DimensionError("grid dimension does not match group");
  if (spec.center_dim() > 1) throw std::invalid_argument("direct path supports centre dimension <= 1");
  const int p = n - 1;  // batched axis
  const int N = g.shape[p];
  const double d = g.spacing(p);
  const std::size_t Np = g.size() / N;
  const bool twisted = spec.center_dim() == 1;
  const double R2 = 4.0 * t * (std::log(1.0 / opt.truncation_eps) + 5.0);

  std::vector<char> live(Np, 0);
  for (std::size_t c = 0; c < Np; ++c)
    for (int j = 0; j < N; ++j)
      if (f[c * N + j] != 0.0) {
        live[c] = 1;
        break;
      }

  GridFunction out(g);
#pragma omp parallel
  {
    std::vector<int> xi(n), yi(n);
    std::vector<double> x(n), y(n), w(p), acc(N);
#pragma omp for schedule(dynamic)
    for (std::size_t cx = 0; cx < Np; ++cx) {
      g.index(cx * N, xi);
      g.point(cx * N, x);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t cy = 0; cy < Np; ++cy) {
        if (!live[cy]) continue;
        g.index(cy * N, yi);
        g.point(cy * N, y);
        double r2 = 0.0, wy = 1.0;
        for (int a = 0; a < p; ++a) {
          w[a] = x[a] - y[a];
          r2 += w[a] * w[a];
          wy *= (yi[a] == 0 || yi[a] == g.shape[a] - 1) ? 0.5 * g.spacing(a) : g.spacing(a);
        }
        if (r2 > R2) continue;
        double shift = 0.0;
        if (twisted)
          for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) shift += 0.5 * spec.structure_constant(p, i, j) * y[i] * x[j];
        const auto col = engine.eval_column(t, w, -(N - 1) * d - shift, d, 2 * N - 1, symbol);
        for (int jy = 0; jy < N; ++jy) {
          const double v = f[cy * N + jy] * wy * ((jy == 0 || jy == N - 1) ? 0.5 * d : d);
          if (v == 0.0) continue;
          for (int ix = 0; ix < N; ++ix) acc[ix] += v * col[ix - jy + N - 1];
        }
      }
      std::copy(acc.begin(), acc.end(), out.values().begin() + cx * N);
    }
  }
  return {std::move(out), 0.0, ConvolutionPath::Direct};
}

ConvolutionResult sampled(const GridFunction& f, double t, const KernelEngine& engine,
                          const ConvolutionOptions& opt) {
  const GroupSpec& spec = engine.group();
  const GridSpec& g = f.grid();
  const int n = spec.dim();
  if (g.dim() != n) throw DimensionError("grid dimension does not match group");
  const auto s = engine.unit_samples();
  const std::size_t M = std::min(opt.draws, s.size() / n);
  if (M == 0) throw std::invalid_argument("sampled convolution needs draws");
  // draws of Z^{-1} at time t
  std::vector<double> zinv(M * n);
  const double st = std::sqrt(t);
  for (std::size_t k = 0; k < M; ++k) {
    spec.dilate_into(st, s.data() + k * n, zinv.data() + k * n);
    for (int a = 0; a < n; ++a) zinv[k * n + a] = -zinv[k * n + a];
  }
  GridFunction out(g);
#pragma omp parallel
  {
    std::vector<double> x(n), y(n);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, x);
      double acc = 0.0;
      for (std::size_t k = 0; k < M; ++k) {
        spec.compose_into(x.data(), zinv.data() + k * n, y.data());
        acc += f.interpolate(y);
      }
      out[i] = acc / static_cast<double>(M);
    }
  }
  return {std::move(out), 0.0, ConvolutionPath::Sampled};
}

}  // namespace carnot::kernels
