#include "carnot/heat_kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "carnot/errors.hpp"
#include "carnot/quadrature.hpp"

namespace carnot {

std::string to_string(EngineKind k) {
  switch (k) {
    case EngineKind::EuclideanClosedForm: return "euclidean-closed-form";
    case EngineKind::HeisenbergQuadrature: return "heisenberg-quadrature";
    case EngineKind::MonteCarloStep2: return "monte-carlo-step2";
  }
  return "unknown";
}

int KernelSymbol::degree(const GroupSpec& spec) const {
  const int Q = spec.homogeneous_dim();
  switch (kind) {
    case Kind::Heat: return -Q;
    case Kind::Partial: return -Q - spec.weight(i);
    case Kind::LeftField:
    case Kind::RightField: return -Q - 1;
    case Kind::Commutator: return -Q;
  }
  return -Q;
}

std::string KernelSymbol::describe() const {
  switch (kind) {
    case Kind::Heat: return "h";
    case Kind::Partial: return "d" + std::to_string(i + 1) + " h";
    case Kind::LeftField: return "X" + std::to_string(i + 1) + " h";
    case Kind::RightField: return "X" + std::to_string(i + 1) + "^R h";
    case Kind::Commutator:
      return "G_" + std::to_string(j + 1) + "^" + std::to_string(i + 1);
  }
  return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;

void check_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("time must be positive");
}

void check_symbol(const KernelSymbol& s, const GroupSpec& spec) {
  const int q = spec.horizontal_dim();
  switch (s.kind) {
    case KernelSymbol::Kind::Heat: return;
    case KernelSymbol::Kind::Partial:
      if (s.i < 0 || s.i >= spec.dim()) throw std::out_of_range("partial index out of range");
      return;
    case KernelSymbol::Kind::LeftField:
    case KernelSymbol::Kind::RightField:
      if (s.i < 0 || s.i >= q) throw std::out_of_range("field index out of range");
      return;
    case KernelSymbol::Kind::Commutator:
      if (s.i < 0 || s.i >= q || s.j < 0 || s.j >= q)
        throw std::out_of_range("commutator kernel index out of range");
      return;
  }
}

// x coth x and x / sinh x without cancellation or overflow.
double xcoth(double x) {
  const double a = std::abs(x);
  if (a < 1e-4) return 1.0 + a * a / 3.0;
  if (a > 40.0) return a;
  return a / std::tanh(a);
}

double xcsch(double x) {
  const double a = std::abs(x);
  if (a < 1e-4) return 1.0 - a * a / 6.0;
  if (a > 40.0) return 2.0 * a * std::exp(-a);
  return a / std::sinh(a);
}

}  // namespace

// Value of a derived kernel from the jet of h at z.
static double symbol_from_jet(const GroupSpec& spec, const CoeffTables& tab, const KernelJet& jet,
                              std::span<const double> z, const KernelSymbol& s) {
  const int n = spec.dim(), q = spec.horizontal_dim();
  switch (s.kind) {
    case KernelSymbol::Kind::Heat: return jet.value;
    case KernelSymbol::Kind::Partial: return jet.grad[s.i];
    case KernelSymbol::Kind::LeftField: return left_field_from_gradient(s.i, jet.grad, z, spec);
    case KernelSymbol::Kind::RightField: return right_field_from_gradient(s.i, jet.grad, z, spec);
    case KernelSymbol::Kind::Commutator: {
      double g = 0.0;
      for (int k = q; k < n; ++k) {
        const double cik = tab.c_coeff(s.i, k, z);
        for (int a = 0; a < q; ++a) {
          const double th = tab.theta(k, s.j, a);
          if (th == 0.0) continue;
          const double xr = right_field_from_gradient(a, jet.grad, z, spec);
          g += th * (tab.c(s.i, k, a) * jet.value + cik * xr);
        }
      }
      return g;
    }
  }
  return 0.0;
}

namespace detail {

class EngineImpl {
 public:
  EngineImpl(EngineKind kind, GroupSpec spec)
      : kind_(kind), spec_(std::move(spec)), tables_(derive_coeff_tables(spec_)) {}
  virtual ~EngineImpl() = default;

  EngineKind kind() const { return kind_; }
  const GroupSpec& spec() const { return spec_; }
  const CoeffTables& tables() const { return tables_; }

  virtual double value(double t, std::span<const double> x) const = 0;
  virtual KernelJet jet(double t, std::span<const double> x) const = 0;
  virtual KernelEstimate estimate(double t, std::span<const double> x) const {
    return {value(t, x), 0.0};
  }
  virtual bool analytic() const { return true; }
  virtual bool has_central() const { return false; }
  virtual std::complex<double> central(double, std::span<const double>, double,
                                       const KernelSymbol&) const {
    throw std::logic_error("engine has no central Fourier symbol");
  }
  virtual double symbol(double t, std::span<const double> x, const KernelSymbol& s) const {
    if (s.kind == KernelSymbol::Kind::Heat) return value(t, x);
    return symbol_from_jet(spec_, tables_, jet(t, x), x, s);
  }
  virtual std::vector<double> column(double t, std::span<const double> zp, double z0, double dz,
                                     int count, const KernelSymbol& s) const {
    std::vector<double> out(count);
    std::vector<double> z(spec_.dim());
    std::copy(zp.begin(), zp.end(), z.begin());
    for (int k = 0; k < count; ++k) {
      z.back() = z0 + k * dz;
      out[k] = symbol(t, z, s);
    }
    return out;
  }
  virtual std::string describe() const { return to_string(kind_) + " on " + spec_.name(); }

 protected:
  EngineKind kind_;
  GroupSpec spec_;
  CoeffTables tables_;
};

class EuclideanImpl final : public EngineImpl {
 public:
  explicit EuclideanImpl(GroupSpec spec) : EngineImpl(EngineKind::EuclideanClosedForm, spec) {
    if (!spec_.is_abelian()) throw std::invalid_argument("closed-form engine needs an abelian group");
  }
  double value(double t, std::span<const double> x) const override {
    check_t(t);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::pow(4.0 * kPi * t, -0.5 * spec_.dim()) * std::exp(-r2 / (4.0 * t));
  }
  KernelJet jet(double t, std::span<const double> x) const override {
    KernelJet j;
    j.value = value(t, x);
    j.grad.resize(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) j.grad[a] = -x[a] / (2.0 * t) * j.value;
    return j;
  }
  double symbol(double t, std::span<const double> x, const KernelSymbol& s) const override {
    check_symbol(s, spec_);
    if (s.kind == KernelSymbol::Kind::Commutator) return 0.0;
    return EngineImpl::symbol(t, x, s);
  }
};

// Heisenberg groups H^d, n = 2d + 1: partial Fourier transform in the centre
//   h^(t, x', l) = (4 pi t)^{-d} (l t / sinh l t)^d exp(-|x'|^2 l coth(l t) / 4).
class HeisenbergImpl final : public EngineImpl {
 public:
  HeisenbergImpl(GroupSpec spec, QuadratureParams p)
      : EngineImpl(EngineKind::HeisenbergQuadrature, spec), params_(p), d_(spec_.horizontal_dim() / 2) {
    if (!spec_.is_standard_heisenberg())
      throw std::invalid_argument("quadrature engine needs a standard Heisenberg group");
  }

  const QuadratureParams& params() const { return params_; }

  double value(double t, std::span<const double> x) const override {
    check_t(t);
    check_dim(x);
    // homogeneity: h(t, x) = t^{-Q/2} h(1, D(t^{-1/2}) x)
    const double st = std::sqrt(t);
    double r2 = 0.0;
    for (int a = 0; a < 2 * d_; ++a) r2 += x[a] * x[a];
    r2 /= t;
    const double s = x.back() / t;
    const double h1 = integrate(r2, s, 0);
    return h1 * std::pow(st, -spec_.homogeneous_dim());
  }

  KernelJet jet(double t, std::span<const double> x) const override {
    check_t(t);
    check_dim(x);
    const double st = std::sqrt(t);
    const int Q = spec_.homogeneous_dim();
    double r2 = 0.0;
    for (int a = 0; a < 2 * d_; ++a) r2 += x[a] * x[a];
    r2 /= t;
    const double s = x.back() / t;
    KernelJet j;
    j.value = integrate(r2, s, 0) * std::pow(st, -Q);
    const double i1 = integrate(r2, s, 1) * std::pow(st, -Q);
    j.grad.resize(x.size());
    // d_a h(1, y) = -2 y_a I1(y); y_a = x_a / sqrt t, chain rule 1/sqrt t
    for (int a = 0; a < 2 * d_; ++a) j.grad[a] = -2.0 * (x[a] / st) * i1 / st;
    j.grad.back() = integrate(r2, s, 2) * std::pow(st, -Q) / t;
    return j;
  }

  double symbol(double t, std::span<const double> x, const KernelSymbol& s) const override {
    check_symbol(s, spec_);
    return EngineImpl::symbol(t, x, s);
  }

  bool has_central() const override { return true; }

  std::complex<double> central(double t, std::span<const double> w, double lambda,
                               const KernelSymbol& s) const override {
    const int q = spec_.horizontal_dim();
    double r2 = 0.0;
    for (int a = 0; a < q; ++a) r2 += w[a] * w[a];
    const double lt = lambda * t;
    const double E = xcoth(lt) / (4.0 * t);
    const double base = std::pow(4.0 * kPi * t, -d_) * std::pow(xcsch(lt), d_) * std::exp(-r2 * E);
    return base * multiplier(w, lambda, E, s);
  }

  // Factor m with g^ = m h^ for each derived kernel.
  std::complex<double> multiplier(std::span<const double> w, double lambda, double E,
                                  const KernelSymbol& s) const {
    using C = std::complex<double>;
    const int q = spec_.horizontal_dim();
    const int c = q;  // centre index
    auto bq = [&](int i, int j) { return spec_.structure_constant(c, i, j); };
    auto lin = [&](int i, double f) {
      double v = 0.0;
      for (int j = 0; j < q; ++j) v += bq(i, j) * w[j];
      return f * v;
    };
    const C il(0.0, lambda);
    switch (s.kind) {
      case KernelSymbol::Kind::Heat: return 1.0;
      case KernelSymbol::Kind::Partial:
        if (s.i == c) return il;
        return -2.0 * E * w[s.i];
      case KernelSymbol::Kind::LeftField: return -2.0 * E * w[s.i] + il * lin(s.i, -0.5);
      case KernelSymbol::Kind::RightField: return -2.0 * E * w[s.i] + il * lin(s.i, 0.5);
      case KernelSymbol::Kind::Commutator: {
        const double ci = lin(s.i, -1.0);
        C g = 0.0;
        for (int a = 0; a < q; ++a) {
          const double th = tables_.theta(c, s.j, a);
          if (th == 0.0) continue;
          g += th * (-bq(s.i, a) + ci * (-2.0 * E * w[a] + il * lin(a, 0.5)));
        }
        return g;
      }
    }
    return 0.0;
  }

  std::vector<double> column(double t, std::span<const double> zp, double z0, double dz,
                             int count, const KernelSymbol& s) const override {
    check_t(t);
    check_symbol(s, spec_);
    const int q = spec_.horizontal_dim();
    double r2 = 0.0;
    for (int a = 0; a < q; ++a) r2 += zp[a] * zp[a];
    const double smax = std::max(std::abs(z0), std::abs(z0 + (count - 1) * dz)) / t;
    // integrate in u = lambda t at t = 1 scale
    const double umax = cutoff(r2 / t);
    const double width = std::min(1.0, 3.0 / std::max(smax, 1e-300));
    const int panels = std::max(1, static_cast<int>(std::ceil(umax / width)));
    const Rule1D rule = composite_gauss_legendre(panels, params_.batch_order, 0.0, umax);
    std::vector<double> out(count, 0.0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double lambda = rule.nodes[k] / t;
      const std::complex<double> g = central(t, zp, lambda, s) * (rule.weights[k] / t);
      // Re(g e^{i lambda z}) along the column by rotation recurrence
      std::complex<double> e = std::polar(1.0, lambda * z0);
      const std::complex<double> step = std::polar(1.0, lambda * dz);
      for (int m = 0; m < count; ++m) {
        if ((m & 31) == 0) e = std::polar(1.0, lambda * (z0 + m * dz));
        out[m] += (g * e).real();
        e *= step;
      }
    }
    for (double& v : out) v /= kPi;
    return out;
  }

  std::string describe() const override {
    return to_string(kind_) + " on " + spec_.name() + " (tanh-sinh, rel_tol " +
           std::to_string(params_.rel_tol) + ")";
  }

 private:
  void check_dim(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != spec_.dim()) throw DimensionError("point dimension mismatch");
  }

  // u beyond which (2u)^d e^{-d u} e^{-r2 u / 4} (1 + u)^2 is negligible
  double cutoff(double r2) const { return 48.0 / (d_ + 0.25 * r2) + 6.0; }

  // t = 1 integrals over u in [0, inf):
  //   which 0: (1/pi) int A e^{-r2 E} cos(u s)
  //   which 1: (1/pi) int E A e^{-r2 E} cos(u s)
  //   which 2: (1/pi) int -u A e^{-r2 E} sin(u s)
  double integrate(double r2, double s, int which) const {
    const double pref = std::pow(4.0 * kPi, -d_);
    auto f = [&](double u) {
      const double E = 0.25 * xcoth(u);
      const double a = pref * std::pow(xcsch(u), d_) * std::exp(-r2 * E);
      switch (which) {
        case 0: return a * std::cos(u * s);
        case 1: return E * a * std::cos(u * s);
        default: return -u * a * std::sin(u * s);
      }
    };
    const double umax = cutoff(r2);
    const double width = std::min(umax, 8.0 / std::max(std::abs(s), 1e-300));
    const int panels = std::max(1, static_cast<int>(std::ceil(umax / width)));
    boost::math::quadrature::tanh_sinh<double> ts(params_.max_refinements);
    double total = 0.0, err_total = 0.0, l1_total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = umax * p / panels, b = umax * (p + 1) / panels;
      double err = 0.0, l1 = 0.0;
      const double v = ts.integrate(f, a, b, params_.rel_tol, &err, &l1);
      total += v;
      err_total += err;
      l1_total += l1;
    }
    if (err_total > std::max(1e-9, 1e3 * params_.rel_tol) * std::max(l1_total, 1e-300))
      throw ConvergenceError("heat kernel quadrature did not converge", err_total);
    return total / kPi;
  }

  QuadratureParams params_;
  int d_;
};

class MonteCarloImpl final : public EngineImpl {
 public:
  MonteCarloImpl(GroupSpec spec, MonteCarloParams p)
      : EngineImpl(EngineKind::MonteCarloStep2, spec), params_(p) {
    if (p.substeps < 1) throw std::invalid_argument("substeps must be at least 1");
    if (p.samples < 1) throw std::invalid_argument("sample count must be positive");
    if (!(p.bandwidth > 0.0) || !(p.center_bandwidth > 0.0))
      throw std::invalid_argument("KDE bandwidths must be positive");
  }

  const MonteCarloParams& params() const { return params_; }

  std::span<const double> samples() const {
    std::call_once(once_, [this] {
      const int n = spec_.dim();
      auto pts = sample_heat(spec_, 1.0, params_.samples, params_.substeps, params_.seed);
      flat_.resize(pts.size() * n);
      for (std::size_t s = 0; s < pts.size(); ++s)
        std::copy(pts[s].vec().begin(), pts[s].vec().end(), flat_.begin() + s * n);
    });
    return flat_;
  }

  double value(double t, std::span<const double> x) const override { return estimate(t, x).value; }

  KernelEstimate estimate(double t, std::span<const double> x) const override {
    check_t(t);
    if (static_cast<int>(x.size()) != spec_.dim()) throw DimensionError("point dimension mismatch");
    const int n = spec_.dim(), q = spec_.horizontal_dim();
    std::vector<double> y(n), bw(n);
    spec_.dilate_into(1.0 / std::sqrt(t), x.data(), y.data());
    for (int a = 0; a < n; ++a) bw[a] = a < q ? params_.bandwidth : params_.center_bandwidth;
    const auto s = samples();
    const std::size_t N = s.size() / n;
    double norm = 1.0;
    for (int a = 0; a < n; ++a) norm *= 1.0 / (std::sqrt(2.0 * kPi) * bw[a]);
    double acc = 0.0, acc2 = 0.0;
#pragma omp parallel for reduction(+ : acc, acc2) schedule(static)
    for (std::size_t k = 0; k < N; ++k) {
      double e = 0.0;
      bool far = false;
      for (int a = 0; a < n; ++a) {
        const double u = (y[a] - s[k * n + a]) / bw[a];
        if (std::abs(u) > 9.0) {
          far = true;
          break;
        }
        e += u * u;
      }
      if (far) continue;
      // fourth-order Gaussian kernel, cancels the O(bw^2) smoothing bias
      const double c = (0.5 * (n + 2) - 0.5 * e) * std::exp(-0.5 * e);
      acc += c;
      acc2 += c * c;
    }
    const double scale = norm * std::pow(t, -0.5 * spec_.homogeneous_dim());
    const double mean = acc / static_cast<double>(N);
    const double var = std::max(0.0, acc2 / static_cast<double>(N) - mean * mean);
    return {mean * scale, std::sqrt(var / static_cast<double>(N)) * scale};
  }

  // 4th-order centred differences of the KDE, step half a bandwidth.
  KernelJet jet(double t, std::span<const double> x) const override {
    KernelJet j;
    j.value = value(t, x);
    const int n = spec_.dim(), q = spec_.horizontal_dim();
    j.grad.resize(n);
    std::vector<double> y(x.begin(), x.end());
    for (int a = 0; a < n; ++a) {
      const double h = 0.5 * (a < q ? params_.bandwidth * std::sqrt(t) : params_.center_bandwidth * t);
      auto at = [&](double off) {
        y[a] = x[a] + off;
        const double v = value(t, y);
        y[a] = x[a];
        return v;
      };
      j.grad[a] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    }
    return j;
  }

  bool analytic() const override { return false; }

  double symbol(double t, std::span<const double> x, const KernelSymbol& s) const override {
    check_symbol(s, spec_);
    return EngineImpl::symbol(t, x, s);
  }

  std::string describe() const override {
    return to_string(kind_) + " on " + spec_.name() + " (" + std::to_string(params_.samples) +
           " samples, " + std::to_string(params_.substeps) + " substeps, seed " +
           std::to_string(params_.seed) + ")";
  }

 private:
  MonteCarloParams params_;
  mutable std::once_flag once_;
  mutable std::vector<double> flat_;
};

}  // namespace detail

KernelEngine::KernelEngine(std::shared_ptr<const detail::EngineImpl> impl) : impl_(std::move(impl)) {}

KernelEngine KernelEngine::euclidean(const GroupSpec& spec) {
  return KernelEngine(std::make_shared<detail::EuclideanImpl>(spec));
}
KernelEngine KernelEngine::heisenberg(const GroupSpec& spec, QuadratureParams params) {
  return KernelEngine(std::make_shared<detail::HeisenbergImpl>(spec, params));
}
KernelEngine KernelEngine::monte_carlo(const GroupSpec& spec, MonteCarloParams params) {
  return KernelEngine(std::make_shared<detail::MonteCarloImpl>(spec, params));
}
KernelEngine KernelEngine::best_analytic(const GroupSpec& spec) {
  if (spec.is_abelian()) return euclidean(spec);
  if (spec.is_standard_heisenberg()) return heisenberg(spec);
  throw std::invalid_argument("no analytic heat kernel engine for group " + spec.name());
}

EngineKind KernelEngine::kind() const { return impl_->kind(); }
const GroupSpec& KernelEngine::group() const { return impl_->spec(); }
const CoeffTables& KernelEngine::tables() const { return impl_->tables(); }
std::string KernelEngine::describe() const { return impl_->describe(); }
double KernelEngine::eval(double t, std::span<const double> x) const { return impl_->value(t, x); }
double KernelEngine::eval(double t, std::span<const double> x, const KernelSymbol& s) const {
  check_t(t);
  return impl_->symbol(t, x, s);
}
KernelJet KernelEngine::jet(double t, std::span<const double> x) const { return impl_->jet(t, x); }
KernelEstimate KernelEngine::estimate(double t, std::span<const double> x) const {
  check_t(t);
  return impl_->estimate(t, x);
}
bool KernelEngine::analytic_derivatives() const { return impl_->analytic(); }
bool KernelEngine::has_central_symbol() const { return impl_->has_central(); }
std::complex<double> KernelEngine::central_symbol(double t, std::span<const double> w, double lambda,
                                                  const KernelSymbol& s) const {
  check_t(t);
  check_symbol(s, group());
  return impl_->central(t, w, lambda, s);
}
std::vector<double> KernelEngine::eval_column(double t, std::span<const double> zp, double z0,
                                              double dz, int count, const KernelSymbol& s) const {
  return impl_->column(t, zp, z0, dz, count, s);
}
const MonteCarloParams* KernelEngine::mc_params() const {
  auto* p = dynamic_cast<const detail::MonteCarloImpl*>(impl_.get());
  return p ? &p->params() : nullptr;
}
const QuadratureParams* KernelEngine::quad_params() const {
  auto* p = dynamic_cast<const detail::HeisenbergImpl*>(impl_.get());
  return p ? &p->params() : nullptr;
}
std::span<const double> KernelEngine::unit_samples() const {
  auto* p = dynamic_cast<const detail::MonteCarloImpl*>(impl_.get());
  if (!p) throw std::logic_error("engine does not sample");
  return p->samples();
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<GroupPoint> sample_heat(const GroupSpec& spec, double t, std::size_t count,
                                    int substeps, std::uint64_t seed, std::size_t first_index) {
  check_t(t);
  if (substeps < 1) throw std::invalid_argument("substeps must be at least 1");
  const int n = spec.dim(), q = spec.horizontal_dim();
  const double scale = std::sqrt(2.0 * t / substeps);
  std::vector<GroupPoint> out(count, GroupPoint(static_cast<std::size_t>(n)));
#pragma omp parallel
  {
    std::vector<double> x(n), d(n, 0.0), y(n);
#pragma omp for schedule(static)
    for (std::size_t s = 0; s < count; ++s) {
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(first_index + s)));
      std::normal_distribution<double> nd;
      std::fill(x.begin(), x.end(), 0.0);
      for (int k = 0; k < substeps; ++k) {
        for (int a = 0; a < q; ++a) d[a] = scale * nd(rng);
        spec.compose_into(x.data(), d.data(), y.data());
        x.swap(y);
      }
      std::copy(x.begin(), x.end(), out[s].coords().begin());
    }
  }
  return out;
}

std::vector<GroupPoint> sample_heat(const KernelEngine& engine, double t, std::size_t count) {
  const auto* p = engine.mc_params();
  if (!p) throw std::invalid_argument("sample_heat needs a Monte Carlo engine");
  return sample_heat(engine.group(), t, count, p->substeps, p->seed);
}

MassReport kernel_mass(const KernelEngine& engine, double t, const GridSpec& grid,
                       double tolerance) {
  check_t(t);
  grid.validate();
  const GroupSpec& spec = engine.group();
  const int n = spec.dim();
  if (grid.dim() != n) throw DimensionError("mass grid dimension mismatch");
  GridFunction h(grid);
  const int nc = grid.shape[n - 1];
  const std::size_t columns = grid.size() / nc;
#pragma omp parallel
  {
    std::vector<int> idx(n);
    std::vector<double> zp(n - 1);
#pragma omp for schedule(dynamic)
    for (std::size_t c = 0; c < columns; ++c) {
      grid.index(c * nc, idx);
      for (int a = 0; a < n - 1; ++a) zp[a] = grid.coord(a, idx[a]);
      const auto col =
          engine.eval_column(t, zp, grid.lo[n - 1], grid.spacing(n - 1), nc, KernelSymbol::heat());
      std::copy(col.begin(), col.end(), h.values().begin() + c * nc);
    }
  }
  MassReport r;
  r.mass = h.integral();
  // geometric extrapolation of the outermost layers along each axis
  std::vector<int> idx(n);
  for (int a = 0; a < n; ++a) {
    for (int side = 0; side < 2; ++side) {
      const int outer = side == 0 ? 0 : grid.shape[a] - 1;
      const int inner = side == 0 ? 1 : grid.shape[a] - 2;
      double mo = 0.0, mi = 0.0;
      for (std::size_t k = 0; k < h.size(); ++k) {
        grid.index(k, idx);
        if (idx[a] == outer) mo += std::abs(h[k]);
        if (idx[a] == inner) mi += std::abs(h[k]);
      }
      const double cell = grid.cell_volume();
      if (mo == 0.0) continue;
      const double ratio = mi > 0.0 ? mo / mi : 1.0;
      if (ratio >= 1.0) {
        r.tail_estimate = std::numeric_limits<double>::infinity();
      } else {
        r.tail_estimate += mo * cell * ratio / (1.0 - ratio);
      }
    }
  }
  if (r.tail_estimate > tolerance)
    throw TruncationError("kernel mass grid too small for tolerance", r.tail_estimate);
  return r;
}

BoundFit gaussian_bound_fit(const KernelEngine& engine, std::span<const double> ts,
                            std::span<const GroupPoint> xs, double ceiling) {
  const int Q = engine.group().homogeneous_dim();
  struct Sample {
    double scaled;  // t^{Q/2} h
    double r2t;     // |x|^2 / t
  };
  std::vector<Sample> s;
  for (double t : ts) {
    check_t(t);
    for (const auto& x : xs) {
      double r2 = 0.0;
      for (double v : x.vec()) r2 += v * v;
      s.push_back({engine.eval(t, x.coords()) * std::pow(t, 0.5 * Q), r2 / t});
    }
  }
  auto upper_ok = [&](double c) {
    for (const auto& p : s)
      if (p.scaled > c * std::exp(-p.r2t / c)) return false;
    return true;
  };
  auto lower_ok = [&](double c) {
    for (const auto& p : s)
      if (p.scaled < std::exp(-c * p.r2t) / c) return false;
    return true;
  };
  auto smallest = [&](auto ok, const char* which) {
    if (ok(1.0)) return 1.0;
    if (!ok(ceiling))
      throw ConvergenceError(std::string("Gaussian ") + which + " bound fails below ceiling", ceiling);
    double lo = 1.0, hi = ceiling;
    for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
      const double mid = std::sqrt(lo * hi);
      (ok(mid) ? hi : lo) = mid;
    }
    return hi;
  };
  BoundFit f;
  f.c_upper = smallest(upper_ok, "upper");
  f.c_lower = smallest(lower_ok, "lower");
  return f;
}

double derivative_bound_fit(const KernelEngine& engine, const KernelSymbol& s,
                            std::span<const GroupPoint> xs, double ceiling) {
  std::vector<std::pair<double, double>> v;
  for (const auto& x : xs) {
    double r2 = 0.0;
    for (double c : x.vec()) r2 += c * c;
    v.emplace_back(std::abs(engine.eval(1.0, x.coords(), s)), r2);
  }
  auto ok = [&](double c) {
    for (auto [g, r2] : v)
      if (g > c * std::exp(-r2 / c)) return false;
    return true;
  };
  if (ok(1.0)) return 1.0;
  if (!ok(ceiling)) throw ConvergenceError("derivative bound fails below ceiling", ceiling);
  double lo = 1.0, hi = ceiling;
  for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

double truncation_radius(double t, double c, double eps) {
  check_t(t);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("tail mass must be in (0, 1)");
  return std::sqrt(c * t * std::log(1.0 / eps));
}

}  // namespace carnot
