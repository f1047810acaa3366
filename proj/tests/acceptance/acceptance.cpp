// Runs one acceptance criterion (or all of them) and prints one PASS/FAIL line each.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include "carnot/harness.hpp"

namespace {

struct Criterion {
  int id;
  const char* suite;
  const char* config;
  const char* title;
};

const std::vector<Criterion> kCriteria = {
    {1, "kernel", "c01_kernel_axioms.json", "heat kernel mass, symmetry and homogeneity on H1"},
    {2, "kernel", "c02_cross_engine.json", "Monte Carlo vs quadrature density at 10 points"},
    {3, "variation", "c03_euclidean_recovery.json", "de Giorgi limit recovers int |grad f| in R2"},
    {4, "variation", "c04_de_giorgi_sandwich.json", "de Giorgi sweep sandwich on H1"},
    {5, "variation", "c05_ledoux_limit.json", "Ledoux limit equals phi_G |D f|, phi_G constant"},
    {6, "perimeter", "c06_perimeter_limit.json", "half-heat perimeter limit and identity"},
    {7, "commutator", "c07_commutator_kernels.json", "commutator kernel properties"},
    {8, "commutator", "c08_commutator_residual.json", "commutator residual and mu_t bound"},
    {9, "perimeter", "c09_perimeter_bound.json", "perimeter bound with computed c_G"},
    {10, "coarea", "c10_coarea.json", "coarea formula, euclidean cone and H1 profile"},
    {11, "perimeter", "c11_blowup.json", "blow-up of a ball tends to a halfspace"},
};

bool run(const Criterion& c) {
  const std::string path = std::string(CARNOT_CONFIG_DIR) + "/" + c.config;
  try {
    const carnot::RunReport r = carnot::run_suite(c.suite, carnot::ExperimentConfig::load(path));
    for (const auto& k : r.checks)
      std::printf("  %s %-28s %.6g +- %.3g vs %.6g  %s\n", k.passed ? "ok  " : "FAIL", k.name.c_str(),
                  k.value, k.error, k.threshold, k.detail.c_str());
    const bool ok = r.passed();
    std::printf("criterion %02d %s: %s (%.1f s)\n", c.id, c.title, ok ? "PASS" : "FAIL", r.wall_seconds);
    return ok;
  } catch (const std::exception& e) {
    std::printf("criterion %02d %s: FAIL (error: %s)\n", c.id, c.title, e.what());
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  bool ok = true, found = false;
  for (const auto& c : kCriteria) {
    if (which != "all" && std::atoi(which.c_str()) != c.id) continue;
    found = true;
    ok = run(c) && ok;
    std::fflush(stdout);
  }
  if (!found) {
    std::fprintf(stderr, "usage: acceptance [1-11|all]\n");
    return 2;
  }
  return ok ? 0 : 1;
}
