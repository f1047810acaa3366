#include <cmath>
#include <numbers>
#include <random>

#include "carnot/errors.hpp"
#include "carnot/grid.hpp"
#include "carnot/heat_kernel.hpp"
#include "carnot/kernel_quadrature.hpp"
#include "doctest.h"

using namespace carnot;

namespace {

// Levy area representation of the H^1 kernel at t = 1,
//   h(1, w, z) = (1 / 8 pi^2) int cos(l z) (l / sinh l) exp(-|w|^2 l coth(l) / 4) dl,
// by a plain trapezoid sum. Other t by homogeneity.
double levy_oracle(double t, double x, double y, double z) {
  const double w2 = (x * x + y * y) / t, zz = z / t;
  const double dl = 1e-3, L = 60.0;
  double s = 0.5;  // l = 0 term, l / sinh l -> 1, l coth l -> 1
  s *= std::exp(-w2 / 4.0);
  for (double l = dl; l <= L; l += dl)
    s += std::cos(l * zz) * (l / std::sinh(l)) * std::exp(-w2 * l / std::tanh(l) / 4.0);
  return 2.0 * s * dl / (8.0 * std::numbers::pi * std::numbers::pi) / (t * t);
}

}  // namespace

TEST_CASE("heisenberg kernel at the origin") {
  const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  const std::vector<double> o{0.0, 0.0, 0.0};
  CHECK(e.eval(1.0, o) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  CHECK(e.eval(0.25, o) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("heisenberg quadrature matches the Levy area integral") {
  const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double t : {0.5, 1.0, 2.0}) {
    for (int k = 0; k < 6; ++k) {
      const double x = 2.0 * u(rng) * std::sqrt(t), y = 2.0 * u(rng) * std::sqrt(t);
      const double z = 3.0 * u(rng) * t;
      const std::vector<double> p{x, y, z};
      CAPTURE(t);
      CAPTURE(x);
      CAPTURE(y);
      CAPTURE(z);
      CHECK(e.eval(t, p) == doctest::Approx(levy_oracle(t, x, y, z)).epsilon(1e-8));
    }
  }
}

TEST_CASE("euclidean closed form") {
  const KernelEngine e = KernelEngine::euclidean(GroupSpec::euclidean(2));
  const std::vector<double> x{0.3, -1.1};
  const double t = 0.7;
  const double exact = std::exp(-(0.09 + 1.21) / (4 * t)) / (4 * std::numbers::pi * t);
  CHECK(e.eval(t, x) == doctest::Approx(exact).epsilon(1e-14));
  const KernelJet j = e.jet(t, x);
  CHECK(j.grad[0] == doctest::Approx(-x[0] / (2 * t) * exact).epsilon(1e-13));
  CHECK(j.grad[1] == doctest::Approx(-x[1] / (2 * t) * exact).epsilon(1e-13));
}

TEST_CASE("kernel jet agrees with finite differences") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  const KernelEngine e = KernelEngine::heisenberg(g);
  const std::vector<double> x{0.4, -0.3, 0.5};
  const KernelJet j = e.jet(1.0, x);
  for (int a = 0; a < 3; ++a) {
    auto xp = x, xm = x;
    const double h = 1e-4;
    xp[a] += h;
    xm[a] -= h;
    CHECK(j.grad[a] == doctest::Approx((e.eval(1.0, xp) - e.eval(1.0, xm)) / (2 * h)).epsilon(1e-6));
    CHECK(e.eval(1.0, x, KernelSymbol::partial(a)) == doctest::Approx(j.grad[a]).epsilon(1e-10));
  }
}

TEST_CASE("mass on a kernel box") {
  const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  const GridSpec box = kernel_box(e.group(), 1.0, {7.0, 14.0, 41, 57});
  const MassReport m = kernel_mass(e, 1.0, box, 1.0);
  CHECK(m.mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("monte carlo agrees within sampling error") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  MonteCarloParams p;
  p.samples = 200'000;
  p.substeps = 32;
  p.seed = 99;
  const KernelEngine mc = KernelEngine::monte_carlo(g, p);
  const KernelEngine q = KernelEngine::heisenberg(g);
  for (const std::vector<double>& x : {std::vector<double>{0.0, 0.0, 0.0}, {0.8, -0.4, 0.3}}) {
    const KernelEstimate est = mc.estimate(1.0, x);
    CHECK(est.std_error > 0.0);
    // 5 sigma plus the smoothing bias of the KDE
    CHECK(std::abs(est.value - q.eval(1.0, x)) <= 5.0 * est.std_error + 0.03 * q.eval(1.0, x));
  }
}

TEST_CASE("heat samples have the right second moments") {
  // horizontal coordinates are N(0, 2t) for the generator X_1^2 + X_2^2
  const auto xs = sample_heat(GroupSpec::heisenberg(1), 1.0, 50'000, 16, 4);
  double m0 = 0.0, m1 = 0.0;
  for (const auto& x : xs) {
    m0 += x[0] * x[0];
    m1 += x[1] * x[1];
  }
  CHECK(m0 / xs.size() == doctest::Approx(2.0).epsilon(0.03));
  CHECK(m1 / xs.size() == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("engines refuse mismatched dimensions") {
  const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  const std::vector<double> bad{0.0, 0.0};
  CHECK_THROWS_AS(e.eval(1.0, bad), DimensionError);
  CHECK_THROWS(KernelEngine::heisenberg(GroupSpec::free_step2(3)));
}
