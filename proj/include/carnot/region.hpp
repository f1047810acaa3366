#pragma once

#include <span>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

// Length of a \ b for sorted disjoint interval lists.
double difference_length(std::span<const Interval> a, std::span<const Interval> b);

// Subset of R^n. Columns run along the last coordinate axis.
class RegionSpec {
 public:
  enum class Kind { VerticalHalfspace, EuclideanBall, Ellipsoid, LevelSet };

  // {x : <pi x, nu> > 0}, pi the projection on the first q coordinates.
  static RegionSpec vertical_halfspace(std::vector<double> nu, int n);
  static RegionSpec ball(std::vector<double> center, double radius);
  // Axis-aligned: sum ((x_i - c_i) / a_i)^2 < 1.
  static RegionSpec ellipsoid(std::vector<double> center, std::vector<double> axes);
  // {phi < 0}, star-shaped about center and inside the ball of radius reach.
  static RegionSpec level_set(ScalarField phi, std::vector<double> center, double reach);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  bool bounded() const { return kind_ != Kind::VerticalHalfspace; }
  const std::vector<double>& nu() const { return nu_; }
  const std::vector<double>& center() const { return center_; }
  // ball radius, level-set reach, largest ellipsoid semi-axis
  double radius() const { return radius_; }
  const std::vector<double>& axes() const { return axes_; }

  bool contains(std::span<const double> x) const;
  // {s : (x', s) in E} as sorted disjoint intervals (may be unbounded).
  std::vector<Interval> column(std::span<const double> xprime) const;
  void column(std::span<const double> xprime, std::vector<Interval>& out) const;
  // Gradient of a defining function that is negative inside.
  void defining_gradient(std::span<const double> x, std::span<double> g) const;
  // Axis-aligned bounding box; throws for the halfspace.
  void bounds(std::span<double> lo, std::span<double> hi) const;
  // Lebesgue measure; infinite for the halfspace, column quadrature for level sets.
  double volume() const;

 private:
  Kind kind_ = Kind::EuclideanBall;
  int n_ = 0;
  std::vector<double> nu_;
  std::vector<double> center_;
  double radius_ = 0.0;
  std::vector<double> axes_;
  ScalarField phi_;
};

// Points, Euclidean inner unit normals and area weights on the boundary.
struct SurfaceRule {
  int n = 0;
  std::vector<double> points;
  std::vector<double> normals;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t k) const {
    return {points.data() + k * n, static_cast<std::size_t>(n)};
  }
  std::span<const double> normal(std::size_t k) const {
    return {normals.data() + k * n, static_cast<std::size_t>(n)};
  }
};

struct SurfaceParams {
  // nodes per parameter direction (angles get twice as many in azimuth)
  int order = 64;
  // window [-w, w]^n for the halfspace
  double window = 1.0;
};

// Star-shaped radial parametrization for balls and level sets (n = 2, 3),
//   dA = r^{n-1} |grad phi| / |<grad phi, omega>| d omega,
// and a graph parametrization of the plane inside the window for halfspaces.
SurfaceRule surface_rule(const RegionSpec& E, const SurfaceParams& p = {});

}  // namespace carnot
