#include <cmath>
#include <random>

#include "carnot/commutator.hpp"
#include "carnot/errors.hpp"
#include "doctest.h"

using namespace carnot;

TEST_CASE("commutator kernels have zero mean and scale-free mass") {
  const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  GPropertyParams p;
  p.box = {8.0, 18.0, 41, 97};
  const std::vector<double> ts{0.5, 1.0, 2.0};
  for (const CommutatorKernel G : {CommutatorKernel{0, 0}, CommutatorKernel{0, 1}}) {
    const GPropertyReport r = check_G_properties(e, G, ts, p);
    CHECK(r.derivative_path == "analytic");
    CHECK(r.zero_mean < 1e-3);
    CHECK(r.abs_spread < 1e-6);
    CHECK(r.abs_integral.front() > 0.5);
    // tail fraction shrinks with the radius
    CHECK(r.radius_for_tolerance > p.tail_radius);
  }
}

TEST_CASE("commutator kernels match their definition") {
  // G_j^i = sum_k sum_a theta^k_{j a} X_a^R (c_i^k h), with X_a^R applied by central differences
  const GroupSpec g = GroupSpec::heisenberg(1);
  const KernelEngine e = KernelEngine::heisenberg(g);
  const CoeffTables tab = derive_coeff_tables(g);
  const double t = 1.0;
  for (int i = 0; i < 2; ++i) {
    const ScalarField ch{[&](std::span<const double> x) { return tab.c_coeff(i, 2, x) * e.eval(t, x); },
                         nullptr};
    ScalarField f = ch;
    f.gradient = [&](std::span<const double> x, std::span<double> d) {
      std::vector<double> p(x.begin(), x.end()), m(x.begin(), x.end());
      const double s = 1e-4;
      for (int a = 0; a < 3; ++a) {
        p[a] += s;
        m[a] -= s;
        d[a] = (ch.value(p) - ch.value(m)) / (2 * s);
        p[a] = m[a] = x[a];
      }
    };
    const std::vector<double> z{0.6, -0.4, 0.5};
    for (int j = 0; j < 2; ++j) {
      double expected = 0.0;
      for (int a = 0; a < 2; ++a) expected += tab.theta(2, j, a) * right_field(a, f, z, g);
      CHECK(eval_G(e, {i, j}, t, z) == doctest::Approx(expected).epsilon(1e-6));
    }
  }
}

TEST_CASE("commutator symbols are homogeneous") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  const KernelEngine e = KernelEngine::heisenberg(g);
  const KernelSymbol s = KernelSymbol::commutator(1, 0);
  const int d = s.degree(g);
  const GroupPoint z{0.5, 0.3, -0.6};
  const double l = 1.6;
  const GroupPoint lz = dilate(l, z, g);
  CHECK(e.eval(l * l, lz.coords(), s) == doctest::Approx(std::pow(l, d) * e.eval(1.0, z.coords(), s)).epsilon(1e-8));
}

TEST_CASE("commutator kernels reconstruct the centre derivatives") {
  const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<GroupPoint> pts;
  for (int k = 0; k < 8; ++k) pts.push_back({u(rng), u(rng), u(rng)});
  for (int i = 0; i < 2; ++i) CHECK(reconstruction_residual(e, i, 1.0, pts) < 1e-6);
}

TEST_CASE("commutator identity residual shrinks under refinement") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  const KernelEngine e = KernelEngine::heisenberg(g);
  auto f = [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); };
  double prev = 0.0;
  for (int n : {13, 25}) {
    const GridFunction fg = GridFunction::sample(GridSpec::cube(3, 4.0, n), f);
    const ResidualReport r = commutator_residual(0, fg, 0.2, e);
    CHECK(r.gradient_l1 > 0.0);
    if (prev > 0.0) CHECK(r.residual < prev / 2.0);
    prev = r.residual;
  }
}

TEST_CASE("commutator kernels vanish on abelian groups") {
  const KernelEngine e = KernelEngine::euclidean(GroupSpec::euclidean(3));
  const std::vector<double> z{0.1, 0.2, 0.3};
  CHECK(eval_G(e, {0, 0}, 1.0, z) == 0.0);
}
