#include <cmath>
#include <numbers>

#include "carnot/quadrature.hpp"
#include "doctest.h"

using namespace carnot;

TEST_CASE("gauss-legendre is exact to degree 2n-1") {
  const Rule1D r = gauss_legendre(6, -1.0, 2.0);
  for (int p = 0; p <= 11; ++p) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], p);
    const double exact = (std::pow(2.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("composite rule integrates a gaussian") {
  const Rule1D r = composite_gauss_legendre(12, 10, -8.0, 8.0);
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * std::exp(-r.nodes[k] * r.nodes[k]);
  CHECK(s == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("extrapolation recovers polynomial limits") {
  const auto ts = geometric_grid(0.1, 0.5, 5);
  std::vector<double> v;
  for (double t : ts) v.push_back(3.0 - 2.0 * std::sqrt(t) + 0.5 * t);
  const Extrapolation e = richardson_sqrt_t(ts, v, 2);
  CHECK(e.limit == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e.degree == 2);

  std::vector<double> w;
  for (double t : ts) w.push_back(1.5 + 4.0 * t);
  CHECK(richardson(ts, w, 1, 1.0).limit == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS(richardson(ts, w, 1, 0.0));
  CHECK_THROWS(geometric_grid(0.0, 0.5, 3));
}
