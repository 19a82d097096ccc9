#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = PLK_CLI_PATH;
const fs::path kConfigs = PLK_TEST_CONFIG_DIR;
const fs::path kWork = PLK_WORK_DIR;

int run(const std::string& args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string config(const std::string& name) { return "\"" + (kConfigs / (name + ".json")).string() + "\""; }

std::string out(const std::string& name) {
  const fs::path dir = kWork / name;
  fs::remove_all(dir);
  return "\"" + dir.string() + "\"";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("successful runs exit 0") {
  CHECK(run("profile --config " + config("hyperplane") + " --out " + out("profile")) == 0);
  CHECK(fs::exists(kWork / "profile" / "profile.csv"));
  CHECK(run("order --config " + config("kahler") + " --out " + out("order")) == 0);
  CHECK(run("chi --config " + config("chi") + " --out " + out("chi")) == 0);
  CHECK(run("crofton --config " + config("hyperplane") + " --frames 10 --out " + out("crofton")) == 0);
  CHECK(fs::exists(kWork / "crofton" / "report.csv"));
  CHECK(run("slice --config " + config("cubic") + " --frames 5 --out " + out("slice")) == 0);
  CHECK(fs::exists(kWork / "slice" / "slice_0000.csv"));
  CHECK(fs::exists(kWork / "slice" / "slice_aggregate.csv"));
  CHECK(run("ratios --config " + config("ratio_product") + " --out " + out("ratios")) == 0);
  CHECK(run("directional --config " + config("product") + " --out " + out("directional")) == 0);
  CHECK(run("plot --config " + config("hyperplane") + " --out \"" + (kWork / "profile").string() + "\"") == 0);
  CHECK(fs::exists(kWork / "profile" / "plot.py"));
}

TEST_CASE("configuration problems exit 1") {
  CHECK(run("profile --config " + config("unknown_key") + " --out " + out("bad")) == 1);
  CHECK(run("profile --config " + config("missing_seed") + " --out " + out("bad")) == 1);
  CHECK(run("profile --config " + config("does_not_exist") + " --out " + out("bad")) == 1);
  CHECK(run("frobnicate --config " + config("hyperplane") + " --out " + out("bad")) == 1);
  CHECK(run("profile --out " + out("bad")) == 1);
  CHECK(run("profile --config " + config("hyperplane") + " --budget 5 --out " + out("bad")) == 1);
}

TEST_CASE("numeric failure exits 2") {
  CHECK(run("profile --config " + config("overflow") + " --out " + out("overflow")) == 2);
}

TEST_CASE("degenerate slices exit 3") {
  CHECK(run("crofton --config " + config("degenerate_slices") + " --out " + out("degenerate")) == 3);
}

TEST_CASE("repeat runs are byte-identical, regardless of thread count") {
  REQUIRE(run("crofton --config " + config("cubic") + " --frames 20 --budget 5000 --threads 1 --out " + out("rep_a")) == 0);
  REQUIRE(run("crofton --config " + config("cubic") + " --frames 20 --budget 5000 --threads 3 --out " + out("rep_b")) == 0);
  for (const char* f : {"report.csv", "summary.txt", "meta.txt", "config.json"})
    CHECK(slurp(kWork / "rep_a" / f) == slurp(kWork / "rep_b" / f));
}
