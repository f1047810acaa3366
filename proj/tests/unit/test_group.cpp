#include <array>
#include <cmath>
#include <random>
#include <string>

#include "carnot/errors.hpp"
#include "carnot/group.hpp"
#include "doctest.h"

using namespace carnot;

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// H^1 as unipotent 3x3 matrices; exp of the Lie algebra element (x, y, z)
Mat3 heis_exp(double x, double y, double z) {
  return {{{1.0, x, z + 0.5 * x * y}, {0.0, 1.0, y}, {0.0, 0.0, 1.0}}};
}

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

GroupPoint random_point(const GroupSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  GroupPoint p(static_cast<std::size_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) p[a] = u(rng);
  return p;
}

void require_close(const GroupPoint& a, const GroupPoint& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol * (1.0 + std::abs(b[i])));
}

}  // namespace

TEST_CASE("heisenberg law matches the matrix group") {
  const GroupSpec g = GroupSpec::heisenberg(1);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const GroupPoint a = random_point(g, rng), b = random_point(g, rng);
    const GroupPoint c = compose(a, b, g);
    const Mat3 m = mul(heis_exp(a[0], a[1], a[2]), heis_exp(b[0], b[1], b[2]));
    CHECK(m[0][1] == doctest::Approx(c[0]).epsilon(1e-14));
    CHECK(m[1][2] == doctest::Approx(c[1]).epsilon(1e-14));
    CHECK(m[0][2] - 0.5 * m[0][1] * m[1][2] == doctest::Approx(c[2]).epsilon(1e-12));
  }
}

TEST_CASE("group axioms on several presets") {
  for (const std::string preset : {"euclidean:3", "heisenberg:1", "heisenberg:2", "free-step2:3"}) {
    CAPTURE(preset);
    const GroupSpec g = GroupSpec::from_preset(preset);
    std::mt19937_64 rng(11);
    const GroupPoint e(static_cast<std::size_t>(g.dim()));
    for (int k = 0; k < 10; ++k) {
      const GroupPoint a = random_point(g, rng), b = random_point(g, rng), c = random_point(g, rng);
      require_close(compose(compose(a, b, g), c, g), compose(a, compose(b, c, g), g), 1e-12);
      require_close(compose(a, inverse(a), g), e, 1e-12);
      require_close(compose(e, a, g), a, 0.0);
      // dilations are automorphisms
      const double l = 1.7;
      require_close(dilate(l, compose(a, b, g), g), compose(dilate(l, a, g), dilate(l, b, g), g),
                    1e-12);
    }
  }
}

TEST_CASE("preset dimensions") {
  const GroupSpec h2 = GroupSpec::from_preset("heisenberg:2");
  CHECK(h2.dim() == 5);
  CHECK(h2.horizontal_dim() == 4);
  CHECK(h2.homogeneous_dim() == 6);
  CHECK(h2.is_standard_heisenberg());
  const GroupSpec f3 = GroupSpec::free_step2(3);
  CHECK(f3.dim() == 6);
  CHECK(f3.homogeneous_dim() == 9);
  CHECK(GroupSpec::euclidean(4).is_abelian());
  CHECK_THROWS(GroupSpec::from_preset("heisenberg"));
  CHECK_THROWS(GroupSpec::from_preset("lorentz:3"));
}

TEST_CASE("structure constants must be antisymmetric") {
  CHECK_THROWS(GroupSpec::from_structure_constants(3, 2, {0.0, 1.0, 1.0, 0.0}));
  CHECK_NOTHROW(GroupSpec::from_structure_constants(3, 2, {0.0, 1.0, -1.0, 0.0}));
}

TEST_CASE("left fields are derivatives along right translation") {
  // X_i f(x) = d/ds f(x o exp(s e_i)) at s = 0
  const ScalarField f{
      [](std::span<const double> x) { return std::sin(x[0]) * std::cos(0.7 * x[1]) + x[2] * x[2] * 0.3 + x[0] * x[2]; },
      [](std::span<const double> x, std::span<double> g) {
        g[0] = std::cos(x[0]) * std::cos(0.7 * x[1]) + x[2];
        g[1] = -0.7 * std::sin(x[0]) * std::sin(0.7 * x[1]);
        g[2] = 0.6 * x[2] + x[0];
      }};
  const GroupSpec g = GroupSpec::heisenberg(1);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const GroupPoint x = random_point(g, rng);
    for (int i = 0; i < 2; ++i) {
      const double s = 1e-5;
      GroupPoint e(3);
      e[i] = s;
      const GroupPoint me = inverse(e);
      const double right_fd =
          (f.value(compose(x, e, g).coords()) - f.value(compose(x, me, g).coords())) / (2 * s);
      const double left_fd =
          (f.value(compose(e, x, g).coords()) - f.value(compose(me, x, g).coords())) / (2 * s);
      CHECK(left_field(i, f, x.coords(), g) == doctest::Approx(right_fd).epsilon(1e-7));
      CHECK(right_field(i, f, x.coords(), g) == doctest::Approx(left_fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("commutator decomposition tables reproduce X_i - X_i^R") {
  // X_i - X_i^R = sum_k X_k^R(c_i^k .) for k >= q; at step 2 X_k^R = d_k
  const GroupSpec g = GroupSpec::free_step2(3);
  const CoeffTables t = derive_coeff_tables(g);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const GroupPoint x = random_point(g, rng);
    for (int i = 0; i < g.horizontal_dim(); ++i)
      for (int k = g.horizontal_dim(); k < g.dim(); ++k)
        CHECK(t.left_coeff(i, k, x.coords()) - t.right_coeff(i, k, x.coords()) ==
              doctest::Approx(t.c_coeff(i, k, x.coords())).epsilon(1e-12));
  }
}
