#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace carnot {

// Point of R^n in exponential coordinates of the first and second kind
// (they coincide at step 2).
class GroupPoint {
 public:
  GroupPoint() = default;
  explicit GroupPoint(std::size_t n) : c_(n, 0.0) {}
  GroupPoint(std::initializer_list<double> v) : c_(v) {}
  explicit GroupPoint(std::vector<double> v) : c_(std::move(v)) {}

  std::size_t size() const { return c_.size(); }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }
  std::span<double> coords() { return c_; }
  std::span<const double> coords() const { return c_; }
  const std::vector<double>& vec() const { return c_; }

  friend bool operator==(const GroupPoint&, const GroupPoint&) = default;

 private:
  std::vector<double> c_;
};

// Scalar field with exact partial derivatives.
struct ScalarField {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};

// Step <= 2 stratified group on R^n. Coordinates 0..q-1 form the first layer
// (weight 1), q..n-1 the second layer (weight 2). Indices are 0-based.
class GroupSpec {
 public:
  static GroupSpec euclidean(int n);
  static GroupSpec heisenberg(int d);
  static GroupSpec free_step2(int q);
  // b is indexed [k - q][i][j], row-major, size (n-q)*q*q.
  static GroupSpec from_structure_constants(int n, int q, std::vector<double> b,
                                            std::string name = "custom");
  // "euclidean:n", "heisenberg:d", "free-step2:q"
  static GroupSpec from_preset(std::string_view preset);

  int dim() const { return n_; }
  int horizontal_dim() const { return q_; }
  int center_dim() const { return n_ - q_; }
  int homogeneous_dim() const { return q_ + 2 * (n_ - q_); }
  int weight(int i) const { return i < q_ ? 1 : 2; }
  bool is_abelian() const { return n_ == q_; }
  const std::string& name() const { return name_; }

  // b[k][i][j] with k in [q, n), i, j in [0, q).
  double structure_constant(int k, int i, int j) const {
    return b_[(static_cast<std::size_t>(k - q_) * q_ + i) * q_ + j];
  }
  const std::vector<double>& structure_constants() const { return b_; }

  // True when n = q + 1 and b is the standard symplectic form
  // b[n-1][i][i+d] = 1, i < d = q/2.
  bool is_standard_heisenberg() const;

  // Raw-pointer kernels for hot loops; out may alias neither input.
  void compose_into(const double* a, const double* b, double* out) const;
  void dilate_into(double lambda, const double* x, double* out) const;

 private:
  GroupSpec(int n, int q, std::vector<double> b, std::string name);
  void validate() const;

  int n_ = 0;
  int q_ = 0;
  std::vector<double> b_;
  std::string name_;
};

GroupPoint compose(const GroupPoint& a, const GroupPoint& b, const GroupSpec& spec);
GroupPoint inverse(const GroupPoint& g);
GroupPoint dilate(double lambda, const GroupPoint& g, const GroupSpec& spec);

// Coefficient families of the invariant fields, all linear in the first layer.
//   X_i   = d_i + sum_{k>=q} q_i^k(x) d_k,    q_i^k(x)    = sum_j left(i,k,j)  x_j
//   X_i^R = d_i + sum_{k>=q} qb_i^k(x) d_k,   qb_i^k(x)   = sum_j right(i,k,j) x_j
//   X_i   = X_i^R + sum_{k>=q} X_k^R(c_i^k .), c_i^k(x) = sum_j c(i,k,j) x_j
//   X_k^R = sum_{a,b<q} theta(k,a,b) X_a^R X_b^R  for k >= q
struct CoeffTables {
  int n = 0;
  int q = 0;
  std::vector<double> left_lin;
  std::vector<double> right_lin;
  std::vector<double> c_lin;
  std::vector<double> theta_tab;

  double left(int i, int k, int j) const { return left_lin[idx(i, k, j)]; }
  double right(int i, int k, int j) const { return right_lin[idx(i, k, j)]; }
  double c(int i, int k, int j) const { return c_lin[idx(i, k, j)]; }
  double theta(int k, int a, int b) const {
    return theta_tab[(static_cast<std::size_t>(k - q) * q + a) * q + b];
  }

  double left_coeff(int i, int k, std::span<const double> x) const;
  double right_coeff(int i, int k, std::span<const double> x) const;
  // c_i^k(x); equals delta_ik for k < q.
  double c_coeff(int i, int k, std::span<const double> x) const;

 private:
  std::size_t idx(int i, int k, int j) const {
    return (static_cast<std::size_t>(i) * (n - q) + (k - q)) * q + j;
  }
};

CoeffTables derive_coeff_tables(const GroupSpec& spec);

// X_i f(x) and X_i^R f(x) for an analytic field.
double left_field(int i, const ScalarField& f, std::span<const double> x,
                  const GroupSpec& spec);
double right_field(int i, const ScalarField& f, std::span<const double> x,
                   const GroupSpec& spec);

// Same, from a precomputed Euclidean gradient.
double left_field_from_gradient(int i, std::span<const double> grad,
                                std::span<const double> x, const GroupSpec& spec);
double right_field_from_gradient(int i, std::span<const double> grad,
                                 std::span<const double> x, const GroupSpec& spec);

}  // namespace carnot
