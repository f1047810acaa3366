#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "carnot/bv_functionals.hpp"
#include "carnot/grid.hpp"
#include "carnot/group.hpp"
#include "carnot/heat_kernel.hpp"
#include "carnot/kernel_quadrature.hpp"
#include "carnot/region.hpp"
#include "json.hpp"

namespace carnot::harness {

// Read-only view of a JSON object that rejects keys outside `allowed`.
class Node {
 public:
  Node(const nlohmann::json& j, std::string path, std::initializer_list<const char*> allowed);
  Node(const nlohmann::json& j, std::string path, const std::vector<std::string>& allowed);

  const std::string& path() const { return path_; }
  bool has(const char* key) const;
  double number(const char* key) const;
  double number(const char* key, double fallback) const;
  long long integer(const char* key) const;
  long long integer(const char* key, long long fallback) const;
  std::uint64_t u64(const char* key) const;
  bool boolean(const char* key, bool fallback) const;
  std::string string(const char* key) const;
  std::string string(const char* key, const std::string& fallback) const;
  std::vector<double> numbers(const char* key) const;
  std::vector<std::vector<double>> matrix(const char* key) const;
  const nlohmann::json& raw(const char* key) const;
  Node table(const char* key, std::initializer_list<const char*> allowed) const;
  std::vector<const nlohmann::json*> list(const char* key) const;
  std::string child(const char* key) const { return path_ + "." + key; }

 private:
  const nlohmann::json& get(const char* key) const;
  const nlohmann::json* j_;
  std::string path_;
};

[[noreturn]] void fail(const std::string& path, const std::string& what);

GroupSpec read_group(const nlohmann::json& j, const std::string& path);

struct EngineChoice {
  std::string kind = "auto";
  QuadratureParams quad{};
  MonteCarloParams mc{};
};
EngineChoice read_engine(const nlohmann::json& j, const std::string& path);
// MC engines need a seed.
KernelEngine make_engine(const GroupSpec& g, EngineChoice e, std::optional<std::uint64_t> seed);

std::vector<double> read_t_grid(const nlohmann::json& j, const std::string& path);

// {"half_width": a, "points": N} or per-axis {"lo": [..], "hi": [..], "shape": [..]}.
GridSpec read_grid(const nlohmann::json& j, const std::string& path, int n);

HeatRuleParams read_rule(const nlohmann::json& j, const std::string& path);
KernelBoxParams read_box(const nlohmann::json& j, const std::string& path);
SurfaceParams read_surface(const nlohmann::json& j, const std::string& path);
PhiParams read_phi(const nlohmann::json& j, const std::string& path);

RegionSpec read_region(const nlohmann::json& j, const std::string& path, int n);
std::string describe(const RegionSpec& E);

// f = profile(gauge(x)) with gauge level sets {gauge < rho} = E(rho):
//   gaussian   exp(-|x - c|^2 / s)
//   mollified  erfc((|A^{-1}(x - c)| - 1) / eps) / 2
//   cone       (1 - |x - c| / r)_+
struct FunctionSpec {
  std::string kind;
  std::string name;
  std::vector<double> center;
  std::vector<double> axes;
  double scale = 1.0;
  double width = 0.25;
  double radius = 1.0;

  ScalarField field() const;
  // {f > tau} for tau in (tau_lo, tau_hi)
  RegionSpec level(double tau) const;
  double tau_lo() const { return 0.0; }
  double tau_hi() const;
  // |D_G f| = int |profile'(rho)| P_G(E(rho)) d rho
  double profile_reference(const GroupSpec& g, const SurfaceParams& s) const;
  // Closed form of int |grad f| for a Euclidean gaussian.
  std::optional<double> analytic_reference(const GroupSpec& g) const;
};
FunctionSpec read_function(const nlohmann::json& j, const std::string& path, int n);

}  // namespace carnot::harness
