#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plurikit/commands.hpp"
#include "plurikit/config.hpp"
#include "plurikit/errors.hpp"

using namespace plurikit;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = PLK_TEST_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string value_of(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "plurikit_config_test" / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("every bundled config survives a round trip") {
  for (const char* name : {"hyperplane", "cubic", "kahler", "exp_graph", "degenerate_slices", "product", "chi",
                           "overflow", "ratio_product"}) {
    CAPTURE(name);
    const RunConfig c = load_config(kConfigs / (std::string(name) + ".json"));
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
  }
}

TEST_CASE("parsed values") {
  const RunConfig c = load_config(kConfigs / "cubic.json");
  CHECK(c.n == 2);
  CHECK_FALSE(c.m.has_value());
  CHECK(c.mc.seed == 5);
  CHECK(c.mc.budget == 20000);
  CHECK(c.grid.points == 21);
  CHECK(c.grassmannian.frames == 60);
  const Current t = build_current(c);
  CHECK(t.ambient_dim() == 2);
  CHECK(t.kind() == "zero_set");

  const RunConfig p = load_config(kConfigs / "product.json");
  REQUIRE(p.m.has_value());
  CHECK(ambient_dim(p) == 3);
  CHECK(build_space(p) == ProductSpace{2, 1});
  CHECK(build_region(p.region_d_prime, 2).shape == RegionShape::box);
  CHECK(build_region(p.region_d, 1).dim() == 1);
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(load_config(kConfigs / "unknown_key.json"), ConfigError);
  CHECK_THROWS_AS(load_config(kConfigs / "missing_seed.json"), ConfigError);
  CHECK_THROWS_AS(load_config(kConfigs / "no_such_file.json"), ConfigError);
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"space": {"n": 2}, "mc": {"seed": 1, "budget": 999}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"space": {"n": 0}, "mc": {"seed": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"space": {"n": 2}, "mc": {"seed": 1}, "grid": {"r_min": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"space": {"n": 2}, "mc": {"seed": 1}, "grid": {"points": 3}})"), ConfigError);
  // a non-Hermitian coefficient matrix parses but cannot be built
  CHECK_THROWS_AS(build_current(parse_config(R"({"space": {"n": 2}, "mc": {"seed": 1},
      "current": {"kind": "const_form", "family": "matrix", "k": 1, "coefficients": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]}})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"space": {"n": 2}, "mc": {"seed": 1},
      "regions": {"D": {"size": 0}}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"space": {"n": 2}, "mc": {"seed": 1}, "current": {"kind": "galaxy"}})"), ConfigError);
}

TEST_CASE("error messages name the offending field") {
  try {
    load_config(kConfigs / "unknown_key.json");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("budjet") != std::string::npos);
  }
}

TEST_CASE("command catalogue") {
  const auto& names = command_names();
  for (const char* c : {"profile", "slice", "order", "chi", "crofton", "theorem1", "ratios", "directional", "plot"})
    CHECK(std::find(names.begin(), names.end(), c) != names.end());
  CHECK(usage_text().find("exit codes") != std::string::npos);
}

TEST_CASE("profile command writes a calibrated csv") {
  const auto dir = scratch("profile");
  RunOverrides o;
  o.out_dir = dir.string();
  const auto r = run_command_file("profile", kConfigs / "hyperplane.json", o);
  REQUIRE(r.code == ExitCode::ok);
  std::istringstream csv(slurp(dir / "profile.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "r,value,stderr,method");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto a = line.find(','), b = line.find(',', a + 1);
    CHECK(std::abs(std::stod(line.substr(a + 1, b - a - 1)) - 1.0) <= 1e-2);
    ++rows;
  }
  CHECK(rows == 21);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(parse_config(slurp(dir / "config.json")) == load_config(kConfigs / "hyperplane.json"));
}

TEST_CASE("order command on the kahler form") {
  const auto dir = scratch("order");
  RunOverrides o;
  o.out_dir = dir.string();
  REQUIRE(run_command_file("order", kConfigs / "kahler.json", o).code == ExitCode::ok);
  const std::string summary = slurp(dir / "summary.txt");
  CHECK(std::abs(std::stod(value_of(summary, "rho")) - 2.0) <= 0.02);
  CHECK(value_of(summary, "is_algebraic") == "false");
  CHECK(value_of(summary, "type_class") == "normal");
}

TEST_CASE("chi command") {
  const auto dir = scratch("chi");
  RunOverrides o;
  o.out_dir = dir.string();
  REQUIRE(run_command_file("chi", kConfigs / "chi.json", o).code == ExitCode::ok);
  const std::string summary = slurp(dir / "summary.txt");
  CHECK(value_of(summary, "proximate_order") == "true");
  CHECK(std::stod(value_of(summary, "chi_at_1")) == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-15));
  CHECK(fs::exists(dir / "chi.csv"));
}

TEST_CASE("exit codes from the command layer") {
  RunOverrides o;
  o.out_dir = scratch("codes").string();
  CHECK(run_command_file("crofton", kConfigs / "degenerate_slices.json", o).code == ExitCode::degenerate_saturation);
  CHECK(run_command_file("slice", kConfigs / "degenerate_slices.json", o).code == ExitCode::degenerate_saturation);
  CHECK(run_command_file("profile", kConfigs / "overflow.json", o).code == ExitCode::numeric_failure);
  CHECK(run_command_file("profile", kConfigs / "unknown_key.json", o).code == ExitCode::config_error);
  CHECK(run_command_file("bogus", kConfigs / "hyperplane.json", o).code == ExitCode::config_error);
  RunOverrides low = o;
  low.budget = 10;
  CHECK(run_command_file("profile", kConfigs / "hyperplane.json", low).code == ExitCode::config_error);
  CHECK(run_command_file("directional", kConfigs / "hyperplane.json", o).code == ExitCode::config_error);
}

TEST_CASE("seed override changes the stream, repeat runs do not") {
  const auto a = scratch("seed_a"), b = scratch("seed_b"), c = scratch("seed_c");
  RunOverrides o;
  o.out_dir = a.string();
  REQUIRE(run_command_file("profile", kConfigs / "kahler.json", o).code == ExitCode::ok);
  o.out_dir = b.string();
  REQUIRE(run_command_file("profile", kConfigs / "kahler.json", o).code == ExitCode::ok);
  o.out_dir = c.string();
  o.seed = 1234;
  REQUIRE(run_command_file("profile", kConfigs / "kahler.json", o).code == ExitCode::ok);
  CHECK(slurp(a / "profile.csv") == slurp(b / "profile.csv"));
  CHECK(slurp(a / "profile.csv") != slurp(c / "profile.csv"));
}

}
