// Group convolution on Heisenberg-type groups (one-dimensional centre).
//
// With F(y', l) = int f(y', z) e^{-i l z} dz and the kernel transform g^,
//   U(x', l) = int g^(x' - y', l) exp(-i l b(y', x') / 2) F(y', l) dy',
//   b(y', x') = sum_ij b_ij y_i x_j,
// and (f * g)(x', .) is the inverse transform of U(x', .). The centre is
// periodised with period pad_factor * box length.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "carnot/convolution.hpp"
#include "carnot/errors.hpp"

namespace carnot::kernels {

namespace {

std::vector<double> jackson(int K) {
  std::vector<double> g(K + 1);
  const double a = std::numbers::pi / (K + 1);
  for (int m = 0; m <= K; ++m)
    g[m] = ((K - m + 1) * std::cos(a * m) + std::sin(a * m) / std::tan(a)) / (K + 1);
  return g;
}

}  // namespace

ConvolutionResult central_fourier(const GridFunction& f, double t, const KernelEngine& engine,
                                  const KernelSymbol& symbol, const ConvolutionOptions& opt) {
  const GroupSpec& spec = engine.group();
  if (!engine.has_central_symbol() || spec.center_dim() != 1)
    throw std::invalid_argument("central Fourier path needs a Heisenberg-type engine");
  const GridSpec& g = f.grid();
  const int n = spec.dim(), q = n - 1;
  if (g.dim() != n) throw DimensionError("grid dimension does not match group");
  if (opt.pad_factor < 1) throw std::invalid_argument("pad factor must be at least 1");

  const int N3 = g.shape[q];
  const double d3 = g.spacing(q), a3 = g.lo[q];
  std::size_t Np = 1;
  for (int a = 0; a < q; ++a) Np *= g.shape[a];
  const int M = 2 * ((opt.pad_factor * N3 + 1) / 2);
  const int K = M / 2;
  const double P = M * d3;
  const double dl = 2.0 * std::numbers::pi / P;

  std::vector<double> zc(M);
  for (int j = 0; j < M; ++j) zc[j] = a3 + j * d3;
  // cos/sin of l_m z_j
  std::vector<double> ct(static_cast<std::size_t>(K + 1) * M), st(ct.size());
  for (int m = 0; m <= K; ++m)
    for (int j = 0; j < M; ++j) {
      const double ang = dl * m * zc[j];
      ct[static_cast<std::size_t>(m) * M + j] = std::cos(ang);
      st[static_cast<std::size_t>(m) * M + j] = std::sin(ang);
    }

  // first-layer geometry
  std::vector<int> shp(g.shape.begin(), g.shape.begin() + q);
  std::vector<double> h(q);
  for (int a = 0; a < q; ++a) h[a] = g.spacing(a);
  auto xp_of = [&](std::size_t flat, std::vector<int>& idx, std::vector<double>& x) {
    for (int a = q - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % shp[a]);
      flat /= shp[a];
      x[a] = g.lo[a] + idx[a] * h[a];
    }
  };
  auto yweight = [&](const std::vector<int>& idx) {
    double w = 1.0;
    for (int a = 0; a < q; ++a) w *= (idx[a] == 0 || idx[a] == shp[a] - 1) ? 0.5 * h[a] : h[a];
    return w;
  };

  // forward transforms, first-layer trapezoid weight folded in
  const std::size_t KK = static_cast<std::size_t>(K + 1);
  std::vector<double> Fr(Np * KK, 0.0), Fi(Np * KK, 0.0);
  std::vector<char> live(Np, 0);
  double mass_in = 0.0;
#pragma omp parallel reduction(+ : mass_in)
  {
    std::vector<int> idx(q);
    std::vector<double> x(q);
#pragma omp for schedule(static)
    for (std::size_t c = 0; c < Np; ++c) {
      const double* col = f.values().data() + c * N3;
      bool any = false;
      for (int j = 0; j < N3; ++j) any = any || col[j] != 0.0;
      if (!any) continue;
      live[c] = 1;
      xp_of(c, idx, x);
      const double wy = yweight(idx);
      for (int j = 0; j < N3; ++j) {
        const double v = col[j] * wy * ((j == 0 || j == N3 - 1) ? 0.5 * d3 : d3);
        mass_in += v;
        if (v == 0.0) continue;
        for (int m = 0; m <= K; ++m) {
          Fr[c * KK + m] += v * ct[static_cast<std::size_t>(m) * M + j];
          Fi[c * KK + m] -= v * st[static_cast<std::size_t>(m) * M + j];
        }
      }
    }
  }

  // kernel table over first-layer offsets inside the truncation radius
  const double R2 = 4.0 * t * (std::log(1.0 / opt.truncation_eps) + 5.0);
  std::vector<std::vector<int>> offs;
  {
    std::vector<int> o(q);
    for (int a = 0; a < q; ++a) o[a] = -(shp[a] - 1);
    while (true) {
      double r2 = 0.0;
      for (int a = 0; a < q; ++a) r2 += (o[a] * h[a]) * (o[a] * h[a]);
      if (r2 <= R2) offs.push_back(o);
      int a = q - 1;
      while (a >= 0 && ++o[a] > shp[a] - 1) {
        o[a] = -(shp[a] - 1);
        --a;
      }
      if (a < 0) break;
    }
  }
  const std::size_t No = offs.size();
  std::vector<double> Kr(No * KK), Ki(No * KK);
#pragma omp parallel
  {
    std::vector<double> w(q);
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < No; ++k) {
      for (int a = 0; a < q; ++a) w[a] = offs[k][a] * h[a];
      for (int m = 0; m <= K; ++m) {
        const auto v = engine.central_symbol(t, w, dl * m, symbol);
        Kr[k * KK + m] = v.real();
        Ki[k * KK + m] = v.imag();
      }
    }
  }

  std::vector<double> sigma(KK, 1.0);
  if (opt.positivity_filter) sigma = jackson(K);

  std::vector<double> bmat(static_cast<std::size_t>(q) * q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) bmat[i * q + j] = spec.structure_constant(q, i, j);

  GridFunction out(g);
  double pad_abs = 0.0, mass_out = 0.0;
#pragma omp parallel reduction(+ : pad_abs, mass_out)
  {
    std::vector<int> xi(q), yi(q);
    std::vector<double> x(q), y(q), bx(q);
    std::vector<double> Ur(KK), Ui(KK), col(M);
#pragma omp for schedule(dynamic, 4)
    for (std::size_t c = 0; c < Np; ++c) {
      xp_of(c, xi, x);
      for (int i = 0; i < q; ++i) {
        double s = 0.0;
        for (int j = 0; j < q; ++j) s += bmat[i * q + j] * x[j];
        bx[i] = s;
      }
      std::fill(Ur.begin(), Ur.end(), 0.0);
      std::fill(Ui.begin(), Ui.end(), 0.0);
      for (std::size_t k = 0; k < No; ++k) {
        std::size_t yc = 0;
        bool inside = true;
        for (int a = 0; a < q; ++a) {
          yi[a] = xi[a] - offs[k][a];
          if (yi[a] < 0 || yi[a] >= shp[a]) {
            inside = false;
            break;
          }
          yc = yc * shp[a] + yi[a];
        }
        if (!inside || !live[yc]) continue;
        double beta = 0.0;
        for (int a = 0; a < q; ++a) beta += (g.lo[a] + yi[a] * h[a]) * bx[a];
        const double th = -0.5 * dl * beta;
        const double c1 = std::cos(th), s1 = std::sin(th);
        double pr = 1.0, pi = 0.0;
        const double* kr = &Kr[k * KK];
        const double* ki = &Ki[k * KK];
        const double* fr = &Fr[yc * KK];
        const double* fi = &Fi[yc * KK];
        for (int m = 0; m <= K; ++m) {
          const double ar = kr[m] * fr[m] - ki[m] * fi[m];
          const double ai = kr[m] * fi[m] + ki[m] * fr[m];
          Ur[m] += ar * pr - ai * pi;
          Ui[m] += ar * pi + ai * pr;
          const double npr = pr * c1 - pi * s1;
          pi = pr * s1 + pi * c1;
          pr = npr;
        }
      }
      for (int m = 0; m <= K; ++m) {
        const double wgt = sigma[m] * ((m == 0 || m == K) ? 1.0 : 2.0) / P;
        Ur[m] *= wgt;
        Ui[m] *= wgt;
      }
      for (int j = 0; j < M; ++j) {
        double v = 0.0;
        for (int m = 0; m <= K; ++m)
          v += Ur[m] * ct[static_cast<std::size_t>(m) * M + j] -
               Ui[m] * st[static_cast<std::size_t>(m) * M + j];
        col[j] = v;
      }
      double wx = 1.0;
      for (int a = 0; a < q; ++a) wx *= h[a];
      for (int j = 0; j < M; ++j) {
        mass_out += col[j] * wx * d3;
        if (j >= N3) pad_abs += std::abs(col[j]) * wx * d3;
      }
      std::copy(col.begin(), col.begin() + N3, out.values().begin() + c * N3);
    }
  }

  ConvolutionResult r{std::move(out), pad_abs, ConvolutionPath::CentralFourier};
  if (symbol.kind == KernelSymbol::Kind::Heat) r.tail_estimate += std::abs(mass_out - mass_in);
  if (r.tail_estimate > opt.tail_tolerance)
    throw TruncationError("convolution tail above tolerance", r.tail_estimate);
  return r;
}

}  // namespace carnot::kernels
