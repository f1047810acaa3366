// Batch driver for the kernel, variation, perimeter, commutator and coarea suites.
//
//   carnot <suite> --config run.json [--out dir] [--seed n] [--threads n]
//
// Writes <out>/report.json and <out>/report.csv. Exit status: 0 when every check
// passes, 1 when a check fails or a computation aborts, 2 on configuration or IO errors.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "carnot/errors.hpp"
#include "carnot/harness.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kSuites[] = {"kernel", "variation", "perimeter", "commutator", "coarea"};

struct Args {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
};

void print_summary(const carnot::RunReport& r, std::ostream& os) {
  static const char* rel[] = {"<=", "<", ">=", "=="};
  for (const auto& c : r.checks) {
    char line[512];
    std::snprintf(line, sizeof line, "%-4s %-28s %12.6g +- %-10.3g %-2s %-10.6g  %s\n",
                  c.passed ? "ok" : "FAIL", c.name.c_str(), c.value, c.error,
                  rel[static_cast<int>(c.relation)], c.threshold, c.detail.c_str());
    os << line;
  }
  for (const auto& l : r.limits) {
    char line[256];
    std::snprintf(line, sizeof line, "limit %-26s %12.8g +- %-10.3g reference %.8g\n", l.name.c_str(),
                  l.limit, l.error, l.reference);
    os << line;
  }
  os << r.suite << ": " << (r.passed() ? "passed" : "FAILED") << " in " << r.wall_seconds << " s\n";
}

int run(const std::string& suite, const Args& a, bool seed_given, bool threads_given) {
  carnot::ExperimentConfig cfg;
  try {
    cfg = carnot::ExperimentConfig::load(a.config);
    if (seed_given) cfg.seed = a.seed;
  } catch (const carnot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (threads_given) omp_set_num_threads(a.threads);

  std::string out = a.out;
  if (out.empty()) {
    out = ".";
    if (cfg.doc.contains("output") && cfg.doc["output"].contains("dir") &&
        cfg.doc["output"]["dir"].is_string())
      out = cfg.doc["output"]["dir"].get<std::string>();
  }

  carnot::RunReport report;
  try {
    report = carnot::run_suite(suite, cfg);
  } catch (const carnot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const carnot::DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << suite << " aborted: " << e.what() << '\n';
    return 1;
  }

  try {
    fs::create_directories(out);
    std::ofstream js(fs::path(out) / "report.json");
    std::ofstream csv(fs::path(out) / "report.csv");
    if (!js || !csv) throw std::runtime_error("cannot write reports under " + out);
    js << report.to_json().dump(2) << '\n';
    report.write_csv(csv);
    if (!js || !csv) throw std::runtime_error("write failed under " + out);
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  }
  print_summary(report, std::cout);
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-semigroup experiments on step-two Carnot groups"};
  app.require_subcommand(1);
  Args args;
  std::string chosen;
  for (const char* s : kSuites) {
    auto* sub = app.add_subcommand(s, std::string("run the ") + s + " suite");
    sub->add_option("--config", args.config, "experiment file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory");
    sub->add_option("--seed", args.seed, "seed override for Monte Carlo paths");
    sub->add_option("--threads", args.threads, "OpenMP threads")->check(CLI::PositiveNumber);
    sub->callback([&chosen, s] { chosen = s; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  auto* sub = app.get_subcommand(chosen);
  return run(chosen, args, sub->count("--seed") > 0, sub->count("--threads") > 0);
}
