#include <cmath>
#include <limits>
#include <sstream>

#include "carnot/errors.hpp"
#include "carnot/harness.hpp"
#include "doctest.h"

using namespace carnot;
using nlohmann::json;

namespace {

ExperimentConfig cfg(const char* text) { return ExperimentConfig::from_json(json::parse(text), "test"); }

}  // namespace

TEST_CASE("check relations account for the error bar") {
  CHECK(Check::make("a", 0.8, 0.1, 1.0, Relation::AtMost).passed);
  CHECK_FALSE(Check::make("a", 0.95, 0.1, 1.0, Relation::AtMost).passed);
  CHECK(Check::make("a", 1.0, 0.0, 1.0, Relation::AtMost).passed);
  CHECK_FALSE(Check::make("a", 1.0, 0.0, 1.0, Relation::Below).passed);
  CHECK(Check::make("a", 2.5, 0.4, 2.0, Relation::AtLeast).passed);
  CHECK_FALSE(Check::make("a", 2.5, 0.6, 2.0, Relation::AtLeast).passed);
  CHECK(Check::make("a", 0.0, 0.0, 0.0, Relation::Equal).passed);
  CHECK_FALSE(Check::make("a", 0.0, 1e-300, 0.0, Relation::Equal).passed);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(Check::make("a", nan, 0.0, 1.0, Relation::AtMost).passed);
  CHECK(Check::make("a", 1.0, -0.5, 1.4, Relation::AtMost).error == 0.5);
}

TEST_CASE("report serialization") {
  RunReport r;
  r.suite = "kernel";
  r.checks.push_back(Check::make("c", 1.0, 0.0, std::numeric_limits<double>::infinity(), Relation::AtMost));
  r.tables.push_back({"t", {"a", "b"}, {{1.0, 2.0}}});
  const json j = r.to_json();
  CHECK(j["passed"] == true);
  CHECK(j["checks"][0]["threshold"] == "inf");
  CHECK(j["tables"][0]["rows"][0][1] == 2.0);
  std::ostringstream os;
  r.write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("record,name,row,field,value\n", 0) == 0);
  CHECK(s.find("table,t,0,b,2\n") != std::string::npos);
}

TEST_CASE("configs reject unknown keys and bad values") {
  CHECK_THROWS_AS(run_suite("kernel", cfg(R"({"suite": "kernel", "masss": {}})")), ConfigError);
  CHECK_THROWS_AS(run_suite("kernel", cfg(R"({"mass": {"tolerance": 1e-3, "tol": 1}})")), ConfigError);
  CHECK_THROWS_AS(run_suite("variation", cfg(R"({"suite": "kernel"})")), ConfigError);
  CHECK_THROWS_AS(run_suite("nope", cfg("{}")), ConfigError);
  CHECK_THROWS_AS(run_suite("kernel", cfg(R"({"group": {"preset": "heisenberg:x"}})")), ConfigError);
  CHECK_THROWS_AS(run_suite("kernel", cfg(R"({"seed": -3})")), ConfigError);
  // Monte Carlo needs a seed
  CHECK_THROWS_AS(run_suite("kernel", cfg(R"({"engine": {"kind": "monte_carlo"}, "mass": {}})")),
                  ConfigError);
  // t grids must decrease
  CHECK_THROWS_AS(run_suite("variation", cfg(R"({"group": {"preset": "euclidean:2"},
      "de_giorgi": {"functions": [{"kind": "gaussian"}], "grid": {"half_width": 3, "points": 17},
                    "t_grid": [0.1, 0.2]}})")),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::array(), "x"), ConfigError);
}

TEST_CASE("a small kernel suite runs end to end") {
  const RunReport r = run_suite("kernel", cfg(R"({
      "suite": "kernel", "group": {"preset": "heisenberg:1"}, "seed": 4,
      "mass": {"box": {"first_half_width": 7, "center_half_width": 14, "first_points": 33, "center_points": 49},
               "tolerance": 1e-2},
      "symmetry": {"points": 5},
      "homogeneity": {"points": 5}})"));
  CHECK(r.passed());
  CHECK(r.checks.size() == 3);
  CHECK(r.engine.find("quadrature") != std::string::npos);
}

TEST_CASE("a euclidean de Giorgi sweep recovers the total variation") {
  const RunReport r = run_suite("variation", cfg(R"({
      "group": {"preset": "euclidean:2"},
      "de_giorgi": {"functions": [{"kind": "gaussian", "scale": 1.0}],
                    "grid": {"half_width": 6, "points": 129},
                    "t_grid": {"t0": 0.04, "ratio": 0.6, "count": 5},
                    "degree": 4, "reference": "analytic", "limit_tolerance": 0.02}})"));
  CHECK(r.passed());
  REQUIRE(r.limits.size() == 1);
  CHECK(r.limits[0].limit == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(2e-3));
}
