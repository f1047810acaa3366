#include "carnot/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "carnot/errors.hpp"
#include "carnot/quadrature.hpp"

namespace carnot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kColumnSamples = 256;

double sq(double x) { return x * x; }

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double refine_root(const std::function<double(double)>& f, double a, double b) {
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t it = 100;
  const auto r = boost::math::tools::toms748_solve(f, a, b, tol, it);
  return 0.5 * (r.first + r.second);
}

}  // namespace

double difference_length(std::span<const Interval> a, std::span<const Interval> b) {
  double total = 0.0;
  for (const Interval& i : a) {
    double len = i.length();
    for (const Interval& j : b) {
      const double lo = std::max(i.lo, j.lo), hi = std::min(i.hi, j.hi);
      if (hi > lo) len -= hi - lo;
    }
    total += len;
  }
  return total;
}

RegionSpec RegionSpec::vertical_halfspace(std::vector<double> nu, int n) {
  const double m = norm(nu);
  if (n < 1 || nu.empty() || static_cast<int>(nu.size()) > n)
    throw DimensionError("halfspace normal dimension");
  if (std::abs(m - 1.0) > 1e-12) throw std::invalid_argument("halfspace normal must be a unit vector");
  RegionSpec r;
  r.kind_ = Kind::VerticalHalfspace;
  r.n_ = n;
  r.nu_ = std::move(nu);
  return r;
}

RegionSpec RegionSpec::ball(std::vector<double> center, double radius) {
  if (center.empty()) throw DimensionError("ball center dimension");
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  RegionSpec r;
  r.kind_ = Kind::EuclideanBall;
  r.n_ = static_cast<int>(center.size());
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

RegionSpec RegionSpec::ellipsoid(std::vector<double> center, std::vector<double> axes) {
  if (center.empty() || axes.size() != center.size()) throw DimensionError("ellipsoid dimension");
  for (double a : axes)
    if (!(a > 0.0)) throw std::invalid_argument("ellipsoid semi-axes must be positive");
  RegionSpec r;
  r.kind_ = Kind::Ellipsoid;
  r.n_ = static_cast<int>(center.size());
  r.center_ = std::move(center);
  r.radius_ = *std::max_element(axes.begin(), axes.end());
  r.axes_ = std::move(axes);
  return r;
}

RegionSpec RegionSpec::level_set(ScalarField phi, std::vector<double> center, double reach) {
  if (center.empty()) throw DimensionError("level set center dimension");
  if (!(reach > 0.0)) throw std::invalid_argument("level set reach must be positive");
  if (!phi.value || !phi.gradient) throw std::invalid_argument("level set needs value and gradient");
  RegionSpec r;
  r.kind_ = Kind::LevelSet;
  r.n_ = static_cast<int>(center.size());
  r.center_ = std::move(center);
  r.radius_ = reach;
  r.phi_ = std::move(phi);
  if (!(r.phi_.value(r.center_) < 0.0)) throw std::invalid_argument("level set center must be inside");
  return r;
}

bool RegionSpec::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionError("region point dimension");
  switch (kind_) {
    case Kind::VerticalHalfspace: {
      double s = 0.0;
      for (std::size_t i = 0; i < nu_.size(); ++i) s += nu_[i] * x[i];
      return s > 0.0;
    }
    case Kind::EuclideanBall: {
      double s = 0.0;
      for (int i = 0; i < n_; ++i) s += (x[i] - center_[i]) * (x[i] - center_[i]);
      return s < radius_ * radius_;
    }
    case Kind::Ellipsoid: {
      double s = 0.0;
      for (int i = 0; i < n_; ++i) s += sq((x[i] - center_[i]) / axes_[i]);
      return s < 1.0;
    }
    case Kind::LevelSet: return phi_.value(x) < 0.0;
  }
  return false;
}

std::vector<Interval> RegionSpec::column(std::span<const double> xp) const {
  std::vector<Interval> out;
  column(xp, out);
  return out;
}

void RegionSpec::column(std::span<const double> xp, std::vector<Interval>& out) const {
  if (static_cast<int>(xp.size()) != n_ - 1) throw DimensionError("column base dimension");
  out.clear();
  const int last = n_ - 1;
  switch (kind_) {
    case Kind::VerticalHalfspace: {
      double s = 0.0;
      for (std::size_t i = 0; i < nu_.size() && static_cast<int>(i) < last; ++i) s += nu_[i] * xp[i];
      const double a = static_cast<int>(nu_.size()) > last ? nu_[last] : 0.0;
      if (a == 0.0) {
        if (s > 0.0) out.push_back({-kInf, kInf});
      } else if (a > 0.0) {
        out.push_back({-s / a, kInf});
      } else {
        out.push_back({-kInf, -s / a});
      }
      return;
    }
    case Kind::EuclideanBall: {
      double d2 = 0.0;
      for (int i = 0; i < last; ++i) d2 += sq(xp[i] - center_[i]);
      const double h2 = radius_ * radius_ - d2;
      if (h2 <= 0.0) return;
      const double h = std::sqrt(h2);
      out.push_back({center_[last] - h, center_[last] + h});
      return;
    }
    case Kind::Ellipsoid: {
      double d2 = 0.0;
      for (int i = 0; i < last; ++i) d2 += sq((xp[i] - center_[i]) / axes_[i]);
      if (d2 >= 1.0) return;
      const double h = axes_[last] * std::sqrt(1.0 - d2);
      out.push_back({center_[last] - h, center_[last] + h});
      return;
    }
    case Kind::LevelSet: {
      double d2 = 0.0;
      for (int i = 0; i < last; ++i) d2 += sq(xp[i] - center_[i]);
      if (d2 >= radius_ * radius_) return;
      const double h = std::sqrt(radius_ * radius_ - d2);
      std::vector<double> x(xp.begin(), xp.end());
      x.push_back(0.0);
      auto f = [&](double s) {
        x[last] = s;
        return phi_.value(x);
      };
      const double a = center_[last] - h, step = 2.0 * h / kColumnSamples;
      double prev = f(a), start = prev < 0.0 ? a : kInf;
      for (int k = 1; k <= kColumnSamples; ++k) {
        const double s = a + k * step, v = f(s);
        if ((prev < 0.0) != (v < 0.0)) {
          const double root = refine_root(f, s - step, s);
          if (v < 0.0) {
            start = root;
          } else {
            out.push_back({start, root});
            start = kInf;
          }
        }
        prev = v;
      }
      if (start != kInf) out.push_back({start, center_[last] + h});
      return;
    }
  }
}

void RegionSpec::defining_gradient(std::span<const double> x, std::span<double> g) const {
  switch (kind_) {
    case Kind::VerticalHalfspace:
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t i = 0; i < nu_.size(); ++i) g[i] = -nu_[i];
      return;
    case Kind::EuclideanBall:
      for (int i = 0; i < n_; ++i) g[i] = x[i] - center_[i];
      return;
    case Kind::Ellipsoid:
      for (int i = 0; i < n_; ++i) g[i] = (x[i] - center_[i]) / sq(axes_[i]);
      return;
    case Kind::LevelSet: phi_.gradient(x, g); return;
  }
}

void RegionSpec::bounds(std::span<double> lo, std::span<double> hi) const {
  if (!bounded()) throw std::domain_error("halfspace has no bounding box");
  for (int i = 0; i < n_; ++i) {
    const double a = kind_ == Kind::Ellipsoid ? axes_[i] : radius_;
    lo[i] = center_[i] - a;
    hi[i] = center_[i] + a;
  }
}

double RegionSpec::volume() const {
  switch (kind_) {
    case Kind::VerticalHalfspace: return kInf;
    case Kind::EuclideanBall:
      return std::pow(std::numbers::pi, 0.5 * n_) / std::tgamma(0.5 * n_ + 1.0) *
             std::pow(radius_, n_);
    case Kind::Ellipsoid: {
      double v = std::pow(std::numbers::pi, 0.5 * n_) / std::tgamma(0.5 * n_ + 1.0);
      for (double a : axes_) v *= a;
      return v;
    }
    case Kind::LevelSet: break;
  }
  // Gauss-Legendre over the base of the bounding box, exact column lengths
  const int m = n_ - 1;
  const Rule1D r = composite_gauss_legendre(8, 8, -radius_, radius_);
  std::vector<int> idx(m, 0);
  std::vector<double> xp(m);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int a = 0; a < m; ++a) {
      xp[a] = center_[a] + r.nodes[idx[a]];
      w *= r.weights[idx[a]];
    }
    for (const Interval& iv : column(xp)) total += w * iv.length();
    int a = m - 1;
    while (a >= 0 && ++idx[a] == static_cast<int>(r.size())) idx[a--] = 0;
    if (a < 0) break;
  }
  return total;
}

SurfaceRule surface_rule(const RegionSpec& E, const SurfaceParams& p) {
  const int n = E.dim();
  SurfaceRule s;
  s.n = n;
  std::vector<double> x(n), g(n);
  auto push = [&](double w) {
    const double gn = norm(g);
    if (!(gn > 0.0)) throw ConvergenceError("degenerate boundary normal", gn);
    s.points.insert(s.points.end(), x.begin(), x.end());
    for (int i = 0; i < n; ++i) s.normals.push_back(-g[i] / gn);
    s.weights.push_back(w);
  };

  if (E.kind() == RegionSpec::Kind::VerticalHalfspace) {
    // graph over the coordinates other than the dominant normal component
    const auto& nu = E.nu();
    const int k = static_cast<int>(std::max_element(nu.begin(), nu.end(), [](double a, double b) {
                                     return std::abs(a) < std::abs(b);
                                   }) - nu.begin());
    const Rule1D r = gauss_legendre(p.order, -p.window, p.window);
    const int m = n - 1;
    std::vector<int> idx(std::max(m, 1), 0);
    while (true) {
      double w = 1.0 / std::abs(nu[k]), dot = 0.0;
      for (int a = 0, c = 0; a < n; ++a) {
        if (a == k) continue;
        x[a] = r.nodes[idx[c]];
        w *= r.weights[idx[c]];
        if (a < static_cast<int>(nu.size())) dot += nu[a] * x[a];
        ++c;
      }
      x[k] = -dot / nu[k];
      if (std::abs(x[k]) <= p.window) {
        E.defining_gradient(x, g);
        push(w);
      }
      if (m == 0) break;
      int a = m - 1;
      while (a >= 0 && ++idx[a] == p.order) idx[a--] = 0;
      if (a < 0) break;
    }
    return s;
  }

  if (n != 2 && n != 3) throw DimensionError("surface quadrature supports n = 2 and n = 3");
  const auto& c = E.center();
  std::vector<double> omega(n);
  // boundary radius along omega and the area factor r^{n-1}|grad|/|<grad, omega>|
  auto locate = [&](double dw) {
    double r = E.radius();
    if (E.kind() == RegionSpec::Kind::Ellipsoid) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += sq(omega[i] / E.axes()[i]);
      r = 1.0 / std::sqrt(s);
    } else if (E.kind() == RegionSpec::Kind::LevelSet) {
      auto f = [&](double rr) {
        for (int i = 0; i < n; ++i) x[i] = c[i] + rr * omega[i];
        return E.contains(x) ? -1.0 : 1.0;
      };
      // bracket the exit point, then bisect on membership
      double a = 0.0, b = E.radius();
      if (f(b) < 0.0) throw ConvergenceError("level set exceeds its reach", b);
      for (int it = 0; it < 200 && b - a > 1e-15 * E.radius(); ++it) {
        const double mid = 0.5 * (a + b);
        (f(mid) < 0.0 ? a : b) = mid;
      }
      r = 0.5 * (a + b);
    }
    for (int i = 0; i < n; ++i) x[i] = c[i] + r * omega[i];
    E.defining_gradient(x, g);
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += g[i] * omega[i];
    if (!(std::abs(dot) > 0.0)) throw ConvergenceError("region is not star-shaped about its center", dot);
    push(dw * std::pow(r, n - 1) * norm(g) / std::abs(dot));
  };

  const int na = 2 * p.order;
  if (n == 2) {
    for (int k = 0; k < na; ++k) {
      const double th = 2.0 * std::numbers::pi * k / na;
      omega = {std::cos(th), std::sin(th)};
      locate(2.0 * std::numbers::pi / na);
    }
    return s;
  }
  const Rule1D pol = gauss_legendre(p.order, 0.0, std::numbers::pi);
  for (std::size_t i = 0; i < pol.size(); ++i) {
    const double ph = pol.nodes[i];
    for (int k = 0; k < na; ++k) {
      const double th = 2.0 * std::numbers::pi * k / na;
      omega = {std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph)};
      locate(pol.weights[i] * std::sin(ph) * 2.0 * std::numbers::pi / na);
    }
  }
  return s;
}

}  // namespace carnot
