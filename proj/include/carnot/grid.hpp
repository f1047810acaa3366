#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace carnot {

// Node-centred tensor grid on [lo_0,hi_0] x ... x [lo_{n-1},hi_{n-1}], nodes
// include both endpoints. Row-major, last axis fastest.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> shape;

  static GridSpec cube(int n, double half_width, int points);

  int dim() const { return static_cast<int>(shape.size()); }
  std::size_t size() const;
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (shape[axis] - 1); }
  double coord(int axis, int idx) const { return lo[axis] + idx * spacing(axis); }
  std::size_t stride(int axis) const;
  void index(std::size_t flat, std::span<int> idx) const;
  void point(std::size_t flat, std::span<double> x) const;
  // trapezoid weight of a node
  double weight(std::size_t flat) const;
  double cell_volume() const;
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridSpec grid);
  GridFunction(GridSpec grid, std::vector<double> values);

  static GridFunction sample(const GridSpec& grid,
                             const std::function<double(std::span<const double>)>& f);

  const GridSpec& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double integral() const;
  double l1() const;
  // Tensor-product cubic Lagrange interpolation; zero outside the box.
  double interpolate(std::span<const double> x) const;

  // Flat CSV: header x1..xn,value then one row per node.
  void write_csv(std::ostream& os) const;
  static GridFunction read_csv(std::istream& is);
  // int32 n; n x (double lo, double hi); n x int32 shape; doubles row-major.
  void write_binary(std::ostream& os) const;
  static GridFunction read_binary(std::istream& is);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

}  // namespace carnot
