#pragma once

#include <span>
#include <vector>

namespace carnot {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

Rule1D gauss_legendre(int order, double a, double b);
Rule1D composite_gauss_legendre(int panels, int order, double a, double b);

// Limit of v(t) as t -> 0 from a least-squares polynomial fit in s = t^exponent.
struct Extrapolation {
  double limit = 0.0;
  // |difference| between the degree-p fit and the degree-(p-1) fit
  double error = 0.0;
  int degree = 0;
};

Extrapolation richardson(std::span<const double> t, std::span<const double> v, int degree,
                         double exponent);
// exponent 1/2: the natural variable for nonsmooth data (indicators)
Extrapolation richardson_sqrt_t(std::span<const double> t, std::span<const double> v,
                                int degree = 2);

// Geometric grid t0, t0*ratio, ... (count entries).
std::vector<double> geometric_grid(double t0, double ratio, int count);

}  // namespace carnot
