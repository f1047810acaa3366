#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CARNOT_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("cli exit codes") {
  const fs::path dir = fs::temp_directory_path() / "carnot_cli_test";
  fs::create_directories(dir);
  const auto ok = write(dir, "ok.json", R"({"suite": "kernel", "symmetry": {"points": 3}})");
  const auto strict = write(dir, "fail.json", R"({"suite": "kernel", "symmetry": {"points": 3, "tolerance": -1}})");
  const auto typo = write(dir, "typo.json", R"({"suite": "kernel", "symetry": {}})");
  const auto broken = write(dir, "broken.json", R"({"suite": )");
  const std::string out = " --out " + (dir / "out").string();

  CHECK(run("kernel --config " + ok.string() + out) == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(fs::exists(dir / "out" / "report.csv"));
  CHECK(run("kernel --config " + strict.string() + out) == 1);
  CHECK(run("kernel --config " + typo.string() + out) == 2);
  CHECK(run("kernel --config " + broken.string() + out) == 2);
  CHECK(run("variation --config " + ok.string() + out) == 2);
  CHECK(run("kernel --config " + (dir / "missing.json").string()) != 0);
  CHECK(run("") != 0);
  fs::remove_all(dir);
}
