#include "carnot/group.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "carnot/errors.hpp"

namespace carnot {

GroupSpec::GroupSpec(int n, int q, std::vector<double> b, std::string name)
    : n_(n), q_(q), b_(std::move(b)), name_(std::move(name)) {
  validate();
}

GroupSpec GroupSpec::euclidean(int n) {
  if (n < 1) throw std::invalid_argument("euclidean: n must be positive");
  return GroupSpec(n, n, {}, "euclidean:" + std::to_string(n));
}

GroupSpec GroupSpec::heisenberg(int d) {
  if (d < 1) throw std::invalid_argument("heisenberg: d must be positive");
  const int q = 2 * d;
  std::vector<double> b(static_cast<std::size_t>(q) * q, 0.0);
  for (int i = 0; i < d; ++i) {
    b[i * q + i + d] = 1.0;
    b[(i + d) * q + i] = -1.0;
  }
  return GroupSpec(q + 1, q, std::move(b), "heisenberg:" + std::to_string(d));
}

GroupSpec GroupSpec::free_step2(int q) {
  if (q < 2) throw std::invalid_argument("free-step2: q must be at least 2");
  const int m = q * (q - 1) / 2;
  std::vector<double> b(static_cast<std::size_t>(m) * q * q, 0.0);
  int k = 0;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j, ++k) {
      b[(static_cast<std::size_t>(k) * q + i) * q + j] = 1.0;
      b[(static_cast<std::size_t>(k) * q + j) * q + i] = -1.0;
    }
  return GroupSpec(q + m, q, std::move(b), "free-step2:" + std::to_string(q));
}

GroupSpec GroupSpec::from_structure_constants(int n, int q, std::vector<double> b,
                                              std::string name) {
  return GroupSpec(n, q, std::move(b), std::move(name));
}

GroupSpec GroupSpec::from_preset(std::string_view preset) {
  const auto colon = preset.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("group preset needs the form name:int, got '" +
                                std::string(preset) + "'");
  const auto kind = preset.substr(0, colon);
  const auto arg = preset.substr(colon + 1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (ec != std::errc{} || ptr != arg.data() + arg.size())
    throw std::invalid_argument("bad integer in group preset '" + std::string(preset) + "'");
  if (kind == "euclidean") return euclidean(v);
  if (kind == "heisenberg") return heisenberg(v);
  if (kind == "free-step2") return free_step2(v);
  throw std::invalid_argument("unknown group preset '" + std::string(kind) + "'");
}

void GroupSpec::validate() const {
  if (q_ < 1 || n_ < q_) throw DimensionError("group needs 1 <= q <= n");
  const int m = n_ - q_;
  if (b_.size() != static_cast<std::size_t>(m) * q_ * q_)
    throw DimensionError("structure constant array has wrong size");
  for (double v : b_)
    if (!std::isfinite(v)) throw std::invalid_argument("structure constants must be finite");
  for (int k = q_; k < n_; ++k)
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j)
        if (structure_constant(k, i, j) != -structure_constant(k, j, i))
          throw std::invalid_argument("structure constants are not antisymmetric");
  if (m == 0) return;
  // brackets [X_i, X_j], i < j, must span the second layer
  const int pairs = q_ * (q_ - 1) / 2;
  Eigen::MatrixXd M(m, std::max(pairs, 1));
  M.setZero();
  int col = 0;
  for (int i = 0; i < q_; ++i)
    for (int j = i + 1; j < q_; ++j, ++col)
      for (int k = 0; k < m; ++k) M(k, col) = structure_constant(q_ + k, i, j);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (lu.rank() != m)
    throw std::invalid_argument("structure constants do not span the second layer (rank " +
                                std::to_string(lu.rank()) + " < " + std::to_string(m) + ")");
}

bool GroupSpec::is_standard_heisenberg() const {
  if (n_ != q_ + 1 || q_ % 2 != 0) return false;
  const int d = q_ / 2;
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) {
      double want = 0.0;
      if (i < d && j == i + d) want = 1.0;
      if (j < d && i == j + d) want = -1.0;
      if (structure_constant(q_, i, j) != want) return false;
    }
  return true;
}

void GroupSpec::compose_into(const double* a, const double* b, double* out) const {
  for (int i = 0; i < n_; ++i) out[i] = a[i] + b[i];
  for (int k = q_; k < n_; ++k) {
    const double* bk = b_.data() + static_cast<std::size_t>(k - q_) * q_ * q_;
    double s = 0.0;
    for (int i = 0; i < q_; ++i) {
      if (a[i] == 0.0) continue;
      double r = 0.0;
      for (int j = 0; j < q_; ++j) r += bk[i * q_ + j] * b[j];
      s += a[i] * r;
    }
    out[k] += 0.5 * s;
  }
}

void GroupSpec::dilate_into(double lambda, const double* x, double* out) const {
  const double l2 = lambda * lambda;
  for (int i = 0; i < q_; ++i) out[i] = lambda * x[i];
  for (int k = q_; k < n_; ++k) out[k] = l2 * x[k];
}

static void check_dim(const GroupPoint& g, const GroupSpec& spec) {
  if (static_cast<int>(g.size()) != spec.dim())
    throw DimensionError("point has " + std::to_string(g.size()) + " coordinates, group has " +
                         std::to_string(spec.dim()));
}

GroupPoint compose(const GroupPoint& a, const GroupPoint& b, const GroupSpec& spec) {
  check_dim(a, spec);
  check_dim(b, spec);
  GroupPoint out(a.size());
  spec.compose_into(a.coords().data(), b.coords().data(), out.coords().data());
  return out;
}

GroupPoint inverse(const GroupPoint& g) {
  GroupPoint out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = -g[i];
  return out;
}

GroupPoint dilate(double lambda, const GroupPoint& g, const GroupSpec& spec) {
  if (!(lambda > 0.0)) throw std::domain_error("dilation factor must be positive");
  check_dim(g, spec);
  GroupPoint out(g.size());
  spec.dilate_into(lambda, g.coords().data(), out.coords().data());
  return out;
}

double CoeffTables::left_coeff(int i, int k, std::span<const double> x) const {
  double s = 0.0;
  for (int j = 0; j < q; ++j) s += left(i, k, j) * x[j];
  return s;
}

double CoeffTables::right_coeff(int i, int k, std::span<const double> x) const {
  double s = 0.0;
  for (int j = 0; j < q; ++j) s += right(i, k, j) * x[j];
  return s;
}

double CoeffTables::c_coeff(int i, int k, std::span<const double> x) const {
  if (k < q) return i == k ? 1.0 : 0.0;
  double s = 0.0;
  for (int j = 0; j < q; ++j) s += c(i, k, j) * x[j];
  return s;
}

CoeffTables derive_coeff_tables(const GroupSpec& spec) {
  CoeffTables t;
  t.n = spec.dim();
  t.q = spec.horizontal_dim();
  const int n = t.n, q = t.q, m = n - q;
  const std::size_t sz = static_cast<std::size_t>(q) * m * q;
  t.left_lin.assign(sz, 0.0);
  t.right_lin.assign(sz, 0.0);
  t.c_lin.assign(sz, 0.0);
  t.theta_tab.assign(static_cast<std::size_t>(m) * q * q, 0.0);
  for (int i = 0; i < q; ++i)
    for (int k = q; k < n; ++k)
      for (int j = 0; j < q; ++j) {
        const double b = spec.structure_constant(k, i, j);
        const std::size_t id = (static_cast<std::size_t>(i) * m + (k - q)) * q + j;
        // x o (s e_i) differentiated at s = 0 gives -(1/2) b x_j in slot k
        t.left_lin[id] = -0.5 * b;
        t.right_lin[id] = 0.5 * b;
        t.c_lin[id] = -b;
      }
  if (m == 0) return t;

  // theta^k: antisymmetric q x q matrix with
  //   sum_{a,b} theta_ab [X_a^R, X_b^R] / 2 = X_k^R,
  // using [X_a^R, X_b^R] = -sum_k b[k][a][b] d_k and X_k^R = d_k for k >= q.
  const int unknowns = q * q;
  const int sym_rows = q * (q + 1) / 2;
  Eigen::MatrixXd A(sym_rows + m, unknowns);
  A.setZero();
  int row = 0;
  for (int a = 0; a < q; ++a)
    for (int b = a; b < q; ++b, ++row) {
      A(row, a * q + b) += 1.0;
      A(row, b * q + a) += 1.0;
    }
  for (int kk = 0; kk < m; ++kk)
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        A(sym_rows + kk, a * q + b) = -0.5 * spec.structure_constant(q + kk, a, b);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sym_rows + m);
    rhs(sym_rows + k) = 1.0;
    Eigen::VectorXd sol = cod.solve(rhs);
    const double res = (A * sol - rhs).norm();
    if (res > 1e-10)
      throw std::invalid_argument("theta system is inconsistent (residual " +
                                  std::to_string(res) + "): second layer not spanned");
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        t.theta_tab[(static_cast<std::size_t>(k) * q + a) * q + b] = sol(a * q + b);
  }
  return t;
}

static void check_field_index(int i, std::span<const double> x, const GroupSpec& spec) {
  if (i < 0 || i >= spec.horizontal_dim())
    throw std::out_of_range("horizontal field index out of range");
  if (static_cast<int>(x.size()) != spec.dim()) throw DimensionError("point dimension mismatch");
}

double left_field_from_gradient(int i, std::span<const double> grad, std::span<const double> x,
                                const GroupSpec& spec) {
  check_field_index(i, x, spec);
  const int q = spec.horizontal_dim();
  double v = grad[i];
  for (int k = q; k < spec.dim(); ++k) {
    double c = 0.0;
    for (int j = 0; j < q; ++j) c += spec.structure_constant(k, i, j) * x[j];
    v -= 0.5 * c * grad[k];
  }
  return v;
}

double right_field_from_gradient(int i, std::span<const double> grad, std::span<const double> x,
                                 const GroupSpec& spec) {
  check_field_index(i, x, spec);
  const int q = spec.horizontal_dim();
  double v = grad[i];
  for (int k = q; k < spec.dim(); ++k) {
    double c = 0.0;
    for (int j = 0; j < q; ++j) c += spec.structure_constant(k, i, j) * x[j];
    v += 0.5 * c * grad[k];
  }
  return v;
}

double left_field(int i, const ScalarField& f, std::span<const double> x, const GroupSpec& spec) {
  std::vector<double> g(x.size());
  f.gradient(x, g);
  return left_field_from_gradient(i, g, x, spec);
}

double right_field(int i, const ScalarField& f, std::span<const double> x,
                   const GroupSpec& spec) {
  std::vector<double> g(x.size());
  f.gradient(x, g);
  return right_field_from_gradient(i, g, x, spec);
}

}  // namespace carnot
