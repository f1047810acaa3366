#include "carnot/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <stdexcept>

namespace carnot {

Rule1D gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  Rule1D r;
  r.nodes.reserve(order);
  r.weights.reserve(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  // nonnegative zeros in increasing order
  const std::vector<double> z = boost::math::legendre_p_zeros<double>(order);
  std::vector<double> xs;
  for (auto it = z.rbegin(); it != z.rend(); ++it)
    if (*it > 0.0) xs.push_back(-*it);
  xs.insert(xs.end(), z.begin(), z.end());
  for (double x : xs) {
    const double dp = boost::math::legendre_p_prime<double>(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes.push_back(mid + half * x);
    r.weights.push_back(half * w);
  }
  return r;
}

Rule1D composite_gauss_legendre(int panels, int order, double a, double b) {
  if (panels < 1) throw std::invalid_argument("composite rule needs at least one panel");
  const Rule1D base = gauss_legendre(order, -1.0, 1.0);
  Rule1D r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t k = 0; k < base.size(); ++k) {
      r.nodes.push_back(mid + 0.5 * h * base.nodes[k]);
      r.weights.push_back(0.5 * h * base.weights[k]);
    }
  }
  return r;
}

static double fit_intercept(std::span<const double> s, std::span<const double> v, int degree) {
  const int m = static_cast<int>(s.size());
  Eigen::MatrixXd A(m, degree + 1);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= s[i]) A(i, d) = p;
    y(i) = v[i];
  }
  return A.colPivHouseholderQr().solve(y)(0);
}

Extrapolation richardson(std::span<const double> t, std::span<const double> v, int degree,
                         double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("extrapolation exponent must be positive");
  if (t.size() != v.size() || t.empty())
    throw std::invalid_argument("extrapolation needs matching nonempty samples");
  if (degree < 0) throw std::invalid_argument("negative extrapolation degree");
  std::vector<double> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0)) throw std::domain_error("extrapolation abscissae must be positive");
    s[i] = std::pow(t[i], exponent);
  }
  const int deg = std::min<int>(degree, static_cast<int>(t.size()) - 1);
  Extrapolation e;
  e.degree = deg;
  e.limit = fit_intercept(s, v, deg);
  e.error = deg > 0 ? std::abs(e.limit - fit_intercept(s, v, deg - 1)) : std::abs(e.limit);
  return e;
}

Extrapolation richardson_sqrt_t(std::span<const double> t, std::span<const double> v, int degree) {
  return richardson(t, v, degree, 0.5);
}

std::vector<double> geometric_grid(double t0, double ratio, int count) {
  if (!(t0 > 0.0) || !(ratio > 0.0) || count < 1)
    throw std::invalid_argument("geometric grid needs t0 > 0, ratio > 0, count >= 1");
  std::vector<double> g(count);
  double t = t0;
  for (int i = 0; i < count; ++i, t *= ratio) g[i] = t;
  return g;
}

}  // namespace carnot
