#include <cmath>
#include <numbers>

#include "carnot/bv_functionals.hpp"
#include "doctest.h"

using namespace carnot;

namespace {

constexpr double pi = std::numbers::pi;

// P_G of the unit ball in H^1 by a midpoint sum over (polar, azimuth), written
// out from the fields X_1 = d_1 - (x_2/2) d_3, X_2 = d_2 + (x_1/2) d_3.
double h1_ball_perimeter_oracle(int m) {
  double s = 0.0;
  const double dth = pi / m, dph = 2 * pi / (2 * m);
  for (int a = 0; a < m; ++a) {
    const double th = (a + 0.5) * dth;
    for (int b = 0; b < 2 * m; ++b) {
      const double ph = (b + 0.5) * dph;
      const double x = std::sin(th) * std::cos(ph), y = std::sin(th) * std::sin(ph), z = std::cos(th);
      const double v1 = x - 0.5 * y * z, v2 = y + 0.5 * x * z;
      s += std::sqrt(v1 * v1 + v2 * v2) * std::sin(th) * dth * dph;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("perimeter of euclidean balls") {
  const RegionSpec b = RegionSpec::ball({0.1, 0.2, -0.3}, 0.7);
  CHECK(perimeter_smooth(b, GroupSpec::euclidean(3)) == doctest::Approx(4 * pi * 0.49).epsilon(1e-10));
  const RegionSpec d = RegionSpec::ball({0.0, 0.0}, 1.3);
  CHECK(perimeter_smooth(d, GroupSpec::euclidean(2)) == doctest::Approx(2 * pi * 1.3).epsilon(1e-12));
}

TEST_CASE("H1 perimeter of the unit ball") {
  const RegionSpec b = RegionSpec::ball({0.0, 0.0, 0.0}, 1.0);
  const double p = perimeter_smooth(b, GroupSpec::heisenberg(1), {128, 1.0});
  CHECK(p == doctest::Approx(h1_ball_perimeter_oracle(2000)).epsilon(1e-6));
  CHECK(p == doctest::Approx(10.169071).epsilon(1e-6));
}

TEST_CASE("phi_G equals the euclidean line integral") {
  // integrating the centre out leaves the N(0, 2 I) density of the first layer,
  // whose integral over a line through 0 is 1 / sqrt(4 pi)
  const double expected = 1.0 / std::sqrt(4 * pi);
  const KernelEngine e2 = KernelEngine::euclidean(GroupSpec::euclidean(2));
  const std::vector<double> nu{0.6, 0.8};
  CHECK(phi_G(nu, e2) == doctest::Approx(expected).epsilon(1e-10));
  const KernelEngine h = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  PhiParams p;
  p.order = 24;
  p.center_step = 0.1;
  CHECK(phi_G(nu, h, p) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("c_G in the plane") {
  // int |grad h(1, z)| = E|Z| / 2 with Z ~ N(0, 2 I_2), which is sqrt(pi) / 2;
  // the trapezoid sees the kink of |grad h| at 0
  const KernelEngine e = KernelEngine::euclidean(GroupSpec::euclidean(2));
  CHECK(c_G(e, {9.0, 24.0, 181, 3}) == doctest::Approx(std::sqrt(pi) / 2).epsilon(5e-5));
}

TEST_CASE("de Giorgi functional of a gaussian in the plane") {
  // W_t exp(-|x|^2) = exp(-|x|^2 / (1 + 4t)) / (1 + 4t), total variation pi^{3/2} / sqrt(1 + 4t)
  const GroupSpec g = GroupSpec::euclidean(2);
  const KernelEngine e = KernelEngine::euclidean(g);
  const GridFunction f = GridFunction::sample(GridSpec::cube(2, 6.0, 161), [](std::span<const double> x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  for (double t : {0.05, 0.2}) {
    const FunctionalValue v = de_giorgi_functional(f, t, e);
    CHECK(v.value == doctest::Approx(std::pow(pi, 1.5) / std::sqrt(1 + 4 * t)).epsilon(1e-4));
  }
}

TEST_CASE("half heat of a disk approaches phi times perimeter") {
  const GroupSpec g = GroupSpec::euclidean(2);
  const KernelEngine e = KernelEngine::euclidean(g);
  const RegionSpec d = RegionSpec::ball({0.0, 0.0}, 1.0);
  SubstitutionParams p;
  p.base_cells = 256;
  const HalfHeatValue v = half_heat_functional(d, 1e-4, e, p);
  CHECK(v.value == doctest::Approx(std::sqrt(pi)).epsilon(5e-3));
  CHECK(v.value == doctest::Approx(v.complement).epsilon(5e-3));
}

TEST_CASE("coarea for a cone in the plane") {
  // f = (1 - |x|)_+: int |grad f| = pi = int_0^1 2 pi (1 - tau) d tau
  const ScalarField f{[](std::span<const double> x) {
                        return std::max(0.0, 1.0 - std::hypot(x[0], x[1]));
                      },
                      [](std::span<const double> x, std::span<double> d) {
                        const double r = std::hypot(x[0], x[1]);
                        d[0] = r < 1.0 && r > 0.0 ? -x[0] / r : 0.0;
                        d[1] = r < 1.0 && r > 0.0 ? -x[1] / r : 0.0;
                      }};
  const auto levels = [](double tau) { return RegionSpec::ball({0.0, 0.0}, 1.0 - tau); };
  const CoareaReport r =
      coarea_check(f, GridSpec::cube(2, 1.25, 401), levels, 0.0, 1.0, GroupSpec::euclidean(2), 32);
  CHECK(r.level_side == doctest::Approx(pi).epsilon(1e-8));
  CHECK(r.gradient_side == doctest::Approx(pi).epsilon(2e-2));
}

TEST_CASE("blow-up of a halfspace is itself") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  const RegionSpec h = RegionSpec::vertical_halfspace({1.0, 0.0}, 3);
  const std::vector<double> x0{0.0, 0.3, 0.2};
  for (double r : {0.5, 0.1})
    CHECK(blowup_distance(h, x0, r, g, {1.0, 64}).distance == 0.0);
}

TEST_CASE("blow-up of a ball flattens") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  const RegionSpec b = RegionSpec::ball({0.0, 0.0, 0.0}, 1.0);
  const std::vector<double> x0{1.0, 0.0, 0.0};
  const double d1 = blowup_distance(b, x0, 0.4, g, {1.0, 96}).distance;
  const double d2 = blowup_distance(b, x0, 0.1, g, {1.0, 96}).distance;
  CHECK(d2 < d1);
}

TEST_CASE("halfspace perimeter in a window") {
  // |v| = 1 on {x_1 = 0} in H^1, so P_G is the window area 4
  const RegionSpec h = RegionSpec::vertical_halfspace({1.0, 0.0}, 3);
  CHECK(perimeter_smooth(h, GroupSpec::heisenberg(1), {32, 1.0}) ==
        doctest::Approx(4.0).epsilon(1e-10));
}
