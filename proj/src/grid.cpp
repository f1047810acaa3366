#include "carnot/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "carnot/errors.hpp"

namespace carnot {

GridSpec GridSpec::cube(int n, double half_width, int points) {
  GridSpec g;
  g.lo.assign(n, -half_width);
  g.hi.assign(n, half_width);
  g.shape.assign(n, points);
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (shape.empty() || lo.size() != shape.size() || hi.size() != shape.size())
    throw DimensionError("grid bounds and shape disagree in dimension");
  for (std::size_t a = 0; a < shape.size(); ++a) {
    if (shape[a] < 2) throw std::invalid_argument("grid needs at least 2 nodes per axis");
    if (!(hi[a] > lo[a])) throw std::invalid_argument("grid box has empty extent");
  }
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int v : shape) s *= static_cast<std::size_t>(v);
  return s;
}

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim() - 1; a > axis; --a) s *= static_cast<std::size_t>(shape[a]);
  return s;
}

void GridSpec::index(std::size_t flat, std::span<int> idx) const {
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % shape[a]);
    flat /= shape[a];
  }
}

void GridSpec::point(std::size_t flat, std::span<double> x) const {
  for (int a = dim() - 1; a >= 0; --a) {
    x[a] = coord(a, static_cast<int>(flat % shape[a]));
    flat /= shape[a];
  }
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

double GridSpec::weight(std::size_t flat) const {
  double w = cell_volume();
  for (int a = dim() - 1; a >= 0; --a) {
    const int i = static_cast<int>(flat % shape[a]);
    flat /= shape[a];
    if (i == 0 || i == shape[a] - 1) w *= 0.5;
  }
  return w;
}

GridFunction::GridFunction(GridSpec grid) : grid_(std::move(grid)) {
  grid_.validate();
  values_.assign(grid_.size(), 0.0);
}

GridFunction::GridFunction(GridSpec grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) throw DimensionError("value count does not match grid");
}

GridFunction GridFunction::sample(const GridSpec& grid,
                                  const std::function<double(std::span<const double>)>& f) {
  GridFunction g(grid);
  const std::size_t N = g.size();
  const int n = grid.dim();
#pragma omp parallel
  {
    std::vector<double> x(n);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < N; ++i) {
      grid.point(i, x);
      g.values_[i] = f(x);
    }
  }
  return g;
}

double GridFunction::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += grid_.weight(i) * values_[i];
  return s;
}

double GridFunction::l1() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += grid_.weight(i) * std::abs(values_[i]);
  return s;
}

double GridFunction::interpolate(std::span<const double> x) const {
  const int n = dim();
  if (static_cast<int>(x.size()) != n) throw DimensionError("interpolation point dimension");
  std::vector<int> base(n);
  std::vector<double> w(4 * static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    if (x[a] < grid_.lo[a] || x[a] > grid_.hi[a]) return 0.0;
    const double h = grid_.spacing(a);
    const double u = (x[a] - grid_.lo[a]) / h;
    int i0 = static_cast<int>(std::floor(u)) - 1;
    i0 = std::clamp(i0, 0, std::max(0, grid_.shape[a] - 4));
    base[a] = i0;
    const int m = std::min(4, grid_.shape[a]);
    for (int k = 0; k < 4; ++k) {
      if (k >= m) {
        w[4 * a + k] = 0.0;
        continue;
      }
      double l = 1.0;
      for (int j = 0; j < m; ++j)
        if (j != k) l *= (u - (i0 + j)) / static_cast<double>(k - j);
      w[4 * a + k] = l;
    }
  }
  std::size_t combos = 1;
  for (int a = 0; a < n; ++a) combos *= 4;
  double s = 0.0;
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t flat = 0, cc = c;
    double wt = 1.0;
    for (int a = 0; a < n; ++a) {
      const int k = static_cast<int>(cc % 4);
      cc /= 4;
      wt *= w[4 * a + k];
      if (wt == 0.0) break;
      flat += static_cast<std::size_t>(base[a] + k) * grid_.stride(a);
    }
    if (wt != 0.0) s += wt * values_[flat];
  }
  return s;
}

void GridFunction::write_csv(std::ostream& os) const {
  const int n = dim();
  for (int a = 0; a < n; ++a) os << 'x' << (a + 1) << ',';
  os << "value\n";
  std::vector<double> x(n);
  os.precision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    grid_.point(i, x);
    for (int a = 0; a < n; ++a) os << x[a] << ',';
    os << values_[i] << '\n';
  }
}

GridFunction GridFunction::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty grid CSV");
  const int n = static_cast<int>(std::count(line.begin(), line.end(), ','));
  if (n < 1) throw std::runtime_error("grid CSV header has no coordinate columns");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    if (static_cast<int>(r.size()) != n + 1) throw std::runtime_error("ragged grid CSV row");
    rows.push_back(std::move(r));
  }
  GridSpec g;
  std::vector<std::map<double, int>> axes(n);
  for (int a = 0; a < n; ++a) {
    std::vector<double> c;
    for (const auto& r : rows) c.push_back(r[a]);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    g.lo.push_back(c.front());
    g.hi.push_back(c.back());
    g.shape.push_back(static_cast<int>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) axes[a][c[k]] = static_cast<int>(k);
  }
  GridFunction f(g);
  if (rows.size() != f.size()) throw std::runtime_error("grid CSV is not a full tensor grid");
  for (const auto& r : rows) {
    std::size_t flat = 0;
    for (int a = 0; a < n; ++a) flat += axes[a].at(r[a]) * g.stride(a);
    f.values_[flat] = r[n];
  }
  return f;
}

void GridFunction::write_binary(std::ostream& os) const {
  const std::int32_t n = dim();
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (int a = 0; a < n; ++a) {
    os.write(reinterpret_cast<const char*>(&grid_.lo[a]), sizeof(double));
    os.write(reinterpret_cast<const char*>(&grid_.hi[a]), sizeof(double));
  }
  for (int a = 0; a < n; ++a) {
    const std::int32_t s = grid_.shape[a];
    os.write(reinterpret_cast<const char*>(&s), sizeof s);
  }
  os.write(reinterpret_cast<const char*>(values_.data()),
           static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

GridFunction GridFunction::read_binary(std::istream& is) {
  std::int32_t n = 0;
  if (!is.read(reinterpret_cast<char*>(&n), sizeof n) || n < 1 || n > 16)
    throw std::runtime_error("bad grid binary header");
  GridSpec g;
  g.lo.resize(n);
  g.hi.resize(n);
  g.shape.resize(n);
  for (int a = 0; a < n; ++a) {
    is.read(reinterpret_cast<char*>(&g.lo[a]), sizeof(double));
    is.read(reinterpret_cast<char*>(&g.hi[a]), sizeof(double));
  }
  for (int a = 0; a < n; ++a) {
    std::int32_t s = 0;
    is.read(reinterpret_cast<char*>(&s), sizeof s);
    g.shape[a] = s;
  }
  if (!is) throw std::runtime_error("truncated grid binary header");
  GridFunction f(g);
  is.read(reinterpret_cast<char*>(f.values_.data()),
          static_cast<std::streamsize>(f.values_.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated grid binary payload");
  return f;
}

}  // namespace carnot
