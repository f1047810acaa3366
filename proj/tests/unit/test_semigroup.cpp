#include <cmath>
#include <numbers>
#include <sstream>

#include "carnot/convolution.hpp"
#include "carnot/errors.hpp"
#include "carnot/semigroup.hpp"
#include "doctest.h"

using namespace carnot;

namespace {

double bump(std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::exp(-r2);
}

double max_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("euclidean heat flow of a gaussian is a gaussian") {
  // exp(-|x|^2/s) -> (s/(s+4t))^{n/2} exp(-|x|^2/(s+4t))
  const GroupSpec g = GroupSpec::euclidean(2);
  const KernelEngine e = KernelEngine::euclidean(g);
  const GridSpec grid = GridSpec::cube(2, 6.0, 97);
  const double t = 0.3, s = 1.0;
  const GridFunction w = apply_heat(GridFunction::sample(grid, bump), t, e);
  double worst = 0.0;
  std::vector<double> x(2);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.point(k, x);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    worst = std::max(worst, std::abs(w[k] - s / (s + 4 * t) * std::exp(-r2 / (s + 4 * t))));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("direct convolution agrees with the serial reference") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  const KernelEngine e = KernelEngine::heisenberg(g);
  const GridFunction f = GridFunction::sample(GridSpec::cube(3, 1.6, 7), bump);
  const GridFunction ref = reference::direct(f, 0.2, e, KernelSymbol::heat());
  CHECK(max_diff(kernels::direct(f, 0.2, e, KernelSymbol::heat(), {}).values, ref) < 1e-12);

  const KernelEngine eu = KernelEngine::euclidean(GroupSpec::euclidean(3));
  const GridFunction fe = GridFunction::sample(GridSpec::cube(3, 2.0, 9), bump);
  const GridFunction rx = reference::direct(fe, 0.3, eu, KernelSymbol::left(0));
  CHECK(max_diff(kernels::direct(fe, 0.3, eu, KernelSymbol::left(0), {}).values, rx) < 1e-12);
}

TEST_CASE("central Fourier convolution agrees with direct summation") {
  // different treatment of the centre; they agree to the quadrature error
  const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  const GridFunction f = GridFunction::sample(GridSpec::cube(3, 3.0, 11), bump);
  const ConvolutionResult d = kernels::direct(f, 1.0, e, KernelSymbol::heat(), {});
  const ConvolutionResult c = kernels::central_fourier(f, 1.0, e, KernelSymbol::heat(), {});
  CHECK(max_diff(c.values, d.values) < 1e-3);
}

TEST_CASE("separable path for abelian groups") {
  const GroupSpec g = GroupSpec::euclidean(3);
  const KernelEngine e = KernelEngine::euclidean(g);
  const GridSpec grid = GridSpec::cube(3, 2.0, 11);
  const GridFunction f = GridFunction::sample(grid, bump);
  const GridFunction ref = reference::direct(f, 0.1, e, KernelSymbol::heat());
  const ConvolutionResult s = kernels::separable(f, 0.1, e, KernelSymbol::heat(), {});
  CHECK(max_diff(s.values, ref) < 1e-12);
  CHECK(convolve(f, 0.1, e, KernelSymbol::heat()).path == ConvolutionPath::Separable);
}

TEST_CASE("horizontal gradient is fourth order") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  const ScalarField f{bump, [](std::span<const double> x, std::span<double> d) {
                        const double v = bump(x);
                        for (std::size_t a = 0; a < x.size(); ++a) d[a] = -2.0 * x[a] * v;
                      }};
  double errs[2];
  int k = 0;
  for (int n : {25, 49}) {
    const GridSpec grid = GridSpec::cube(3, 2.0, n);
    const HorizontalVectorField num = horizontal_gradient(GridFunction::sample(grid, f.value), g);
    const HorizontalVectorField ex = horizontal_gradient(f, grid, g);
    double m = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p)
      if (num.defined[p])
        for (int i = 0; i < 2; ++i) m = std::max(m, std::abs(num.components[i][p] - ex.components[i][p]));
    errs[k++] = m;
  }
  CHECK(errs[0] / errs[1] > 12.0);
}

TEST_CASE("shift difference quotient tends to the directional variation") {
  // (1/t) int |f(x + t z) - f(x)| -> int |<grad f, z>| on R^2
  const GroupSpec g = GroupSpec::euclidean(2);
  const GridSpec grid = GridSpec::cube(2, 5.0, 201);
  const ScalarField f{bump, nullptr};
  const GroupPoint z{1.0, 0.0};
  const ShiftL1 s = group_shift_l1(f, grid, z, 1e-3, g);
  // int |d_x e^{-|x|^2}| = 2 * int_R e^{-y^2} dy = 2 sqrt(pi)
  CHECK(s.value == doctest::Approx(2.0 * std::sqrt(std::numbers::pi)).epsilon(2e-3));
}

TEST_CASE("grid function io round trips") {
  const GridSpec grid = GridSpec::cube(2, 1.0, 5);
  const GridFunction f = GridFunction::sample(grid, bump);
  std::stringstream csv, bin;
  f.write_csv(csv);
  const GridFunction a = GridFunction::read_csv(csv);
  f.write_binary(bin);
  const GridFunction b = GridFunction::read_binary(bin);
  CHECK(a.grid() == grid);
  CHECK(b.grid() == grid);
  CHECK(max_diff(a, f) < 1e-15);
  CHECK(max_diff(b, f) == 0.0);
}

TEST_CASE("cubic interpolation is exact on cubics") {
  const GridSpec grid = GridSpec::cube(2, 1.0, 9);
  auto p = [](std::span<const double> x) { return 1.0 + x[0] - 2.0 * x[1] * x[1] + x[0] * x[0] * x[0] * x[1]; };
  const GridFunction f = GridFunction::sample(grid, p);
  const std::vector<double> x{0.137, -0.61};
  CHECK(f.interpolate(x) == doctest::Approx(p(x)).epsilon(1e-12));
  const std::vector<double> out{1.5, 0.0};
  CHECK(f.interpolate(out) == 0.0);
}

TEST_CASE("convolution rejects a grid of the wrong dimension") {
  const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  const GridFunction f = GridFunction::sample(GridSpec::cube(2, 1.0, 5), bump);
  CHECK_THROWS_AS(convolve(f, 0.1, e, KernelSymbol::heat()), DimensionError);
}
