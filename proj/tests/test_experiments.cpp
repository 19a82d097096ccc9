#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "plurikit/errors.hpp"
#include "plurikit/experiments.hpp"
#include "support.hpp"

using namespace plurikit;

namespace {

ProfileOptions opts(std::size_t budget, std::uint64_t seed) {
  ProfileOptions o;
  o.budget = budget;
  o.seed = seed;
  return o;
}

FrameOptions frames(std::size_t count) {
  FrameOptions f;
  f.count = count;
  return f;
}

Current hyperplane() { return Current::zero_set(HoloFunction::affine_product(2, {{{{1.0, 0.0}, {0.0, 0.0}}, {}}})); }

Current cubic() {
  return Current::zero_set(HoloFunction::affine_product(2, {{{{0.7, -0.2}, 1.0}, {-0.5, 0.3}},
                                                           {{{-0.4, -0.9}, 1.0}, {0.2, -0.6}},
                                                           {{{-1.3, 0.5}, 1.0}, {-0.8, -0.1}}}));
}

double number(const ExperimentReport& r, const std::string& key) {
  REQUIRE_MESSAGE(r.summary.contains(key), key);
  return std::stod(r.summary.get(key));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("frames are reproducible and forced frames are used verbatim") {
  const auto a = experiment_frames(1, 3, frames(10), 5);
  const auto b = experiment_frames(1, 3, frames(10), 5);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].matrix() == b[i].matrix());
  FrameOptions forced;
  forced.forced = {Frame::standard(1, 3)};
  const auto f = experiment_frames(1, 3, forced, 5);
  REQUIRE(f.size() == 1);
  CHECK(f[0].matrix() == Frame::standard(1, 3).matrix());
  forced.forced = {Frame::standard(2, 3)};
  CHECK_THROWS_AS(experiment_frames(1, 3, forced, 5), ConfigError);
}

TEST_CASE("crofton: hyperplane, kahler form and cubic") {
  const auto grid = RadialGrid::geometric(1.0, 100.0, 5);
  const auto h = crofton_check(hyperplane(), 1, grid, frames(30), opts(10000, 1));
  CHECK(h.passed);
  CHECK(h.degenerate_frames == 0);
  CHECK(number(h, "max_sigma_deviation") <= 3.0);
  // every slice counts exactly one zero; the average still carries one-frame resolution
  for (const auto& row : h.rows) CHECK(row[3] >= 1.0 / 30.0);

  const auto b = crofton_check(Current::const_form(ConstForm::kahler(2)), 1, grid, frames(30), opts(10000, 2));
  CHECK(b.passed);

  const auto c = crofton_check(cubic(), 1, RadialGrid::geometric(0.3, 30.0, 7), frames(300), opts(20000, 3));
  CHECK(c.passed);
  CHECK(c.columns == std::vector<std::string>{"r", "lhs", "rhs", "stderr", "residual"});
  CHECK(c.rows.size() == 7);
}

TEST_CASE("crofton: exploratory runs carry no verdict") {
  CroftonOptions exploratory;
  exploratory.exploratory = true;
  const auto r = crofton_check(hyperplane(), 1, RadialGrid::geometric(1.0, 10.0, 4), frames(5), opts(2000, 1), exploratory);
  CHECK_FALSE(r.has_verdict);
}

TEST_CASE("crofton: slices inside the zero set are degenerate") {
  FrameOptions forced;
  CMatrix col(2, 1);
  col << 0.0, 1.0;
  forced.forced = {Frame::from_columns(col)};
  const auto r = crofton_check(hyperplane(), 1, RadialGrid::geometric(1.0, 10.0, 4), forced, opts(2000, 1));
  CHECK(r.total_frames == 1);
  CHECK(r.degenerate_frames == 1);
  CHECK(r.degenerate_fraction() == 1.0);
  CHECK_FALSE(r.passed);
  CHECK(r.summary.get("suspicious") == "true");
}

TEST_CASE("crofton: dimension guard") {
  const Current top = Current::const_form(ConstForm::general(3, 2, CMatrix::Identity(3, 3)));
  CHECK_THROWS_AS(crofton_check(top, 1, RadialGrid::geometric(1.0, 10.0, 4), frames(5), opts(2000, 1)), ConfigError);
}

TEST_CASE("cap bound: the whole Grassmannian reproduces Crofton") {
  const auto grid = RadialGrid::geometric(1.0, 100.0, 5);
  CapSpec all;
  CHECK(all.is_everything());
  const auto t = theorem1_check(cubic(), all, grid, frames(100), opts(20000, 4));
  const auto c = crofton_check(cubic(), 1, grid, frames(100), opts(20000, 4));
  CHECK(number(t, "cap_measure") == 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // rows of c2 = 1 come first
    CHECK(t.rows[i][2] == doctest::Approx(c.rows[i][2]).epsilon(1e-12));
    CHECK(t.rows[i][3] == doctest::Approx(c.rows[i][1]).epsilon(1e-12));
  }
  CHECK(t.passed);
  CHECK(std::abs(number(t, "c1_hat") - 1.0) <= 0.05);
}

TEST_CASE("cap bound: a cap carries its share of the mass") {
  CapSpec cap;
  cap.theta = std::numbers::pi / 6.0;  // |<e1, L>|^2 >= 3/4, measure 1/4 on G(1, 2)
  CHECK_FALSE(cap.is_everything());
  const auto t = theorem1_check(cubic(), cap, RadialGrid::geometric(1.0, 100.0, 5), frames(800), opts(20000, 6));
  CHECK(std::abs(number(t, "cap_measure") - 0.25) <= 4.0 * std::sqrt(0.25 * 0.75 / 800.0));
  CHECK(t.passed);

  CapSpec tiny;
  tiny.theta = 1e-6;
  CHECK_THROWS_AS(theorem1_check(cubic(), tiny, RadialGrid::geometric(1.0, 100.0, 5), frames(20), opts(2000, 6)),
                  ConfigError);
}

TEST_CASE("slice survey") {
  const auto h = slice_order_survey(hyperplane(), 1, RadialGrid::geometric(1.0, 100.0, 11), frames(20), opts(5000, 7));
  CHECK(number(h, "rho") == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(number(h, "fraction_within_0.3") == 1.0);
  CHECK(number(h, "median_deviation") == doctest::Approx(0.0));
}

TEST_CASE("ratio degeneracy") {
  std::vector<double> seq;
  for (int m = 1; m <= 8; ++m) seq.push_back(std::ldexp(1.0, m));
  const auto h = ratio_degeneracy_check(hyperplane(), seq, {1.0, 2.0}, frames(20), opts(5000, 8));
  CHECK(number(h, "trending_fraction") == 0.0);
  const auto b = ratio_degeneracy_check(Current::const_form(ConstForm::kahler(2)), seq, {1.0}, frames(20), opts(5000, 8));
  CHECK(number(b, "trending_fraction") == 0.0);
  CHECK_THROWS_AS(ratio_degeneracy_check(hyperplane(), {1.0, 2.0, 4.0}, {1.0}, frames(5), opts(5000, 8)), ConfigError);
  CHECK_THROWS_AS(ratio_degeneracy_check(hyperplane(), seq, {}, frames(5), opts(5000, 8)), ConfigError);
}

TEST_CASE("zero slices everywhere imply a zero ambient profile") {
  const auto g = HoloFunction::custom(2, [](std::span<const Complex> z, std::span<Complex> grad) {
    const Complex e = std::exp(z[0] + z[1]);
    if (!grad.empty()) grad[0] = grad[1] = e;
    return e;
  });
  const auto grid = RadialGrid::geometric(0.5, 50.0, 5);
  const auto rep = crofton_check(Current::zero_set(g), 1, grid, frames(20), opts(20000, 9));
  for (const auto& row : rep.rows) {
    CHECK(row[2] == 0.0);
    CHECK(std::abs(row[1]) <= 3.0 * row[3] + 1e-9);
  }
}

TEST_CASE("flat slices imply a flat ambient profile") {
  const auto grid = RadialGrid::geometric(1.0, 100.0, 11);
  const Current t = cubic();
  bool all_flat = true;
  for (const auto& frame : experiment_frames(1, 2, frames(20), 10))
    all_flat = all_flat && is_algebraic(slice_profile(t, frame, grid, opts(1000, 1)));
  CHECK(all_flat);
  CHECK(is_algebraic(nu_profile(t, grid, opts(20000, 10))));
}

TEST_CASE("directional order check") {
  const ProductSpace space{2, 1};
  const auto grid = RadialGrid::geometric(1.0, 100.0, 9);
  const RegionSpec d = RegionSpec::unit_ball(1);
  const RegionSpec b = RegionSpec::unit_ball(2);
  const auto z = directional_order_check(Current::const_form(ConstForm::block_kahler(3, 0, 2)), space, d, b, grid,
                                         opts(20000, 11));
  CHECK(std::abs(number(z, "rho_N") - 2.0) <= 0.1);
  CHECK(number(z, "rho_M") == 0.0);
  CHECK(z.summary.get("proposition1") == "true");
  CHECK(z.summary.get("theorem3") == "true");
}

TEST_CASE("reports are written deterministically") {
  const auto dir = std::filesystem::temp_directory_path() / "plurikit_report_test";
  std::filesystem::remove_all(dir);
  const auto run = [&] {
    return crofton_check(hyperplane(), 1, RadialGrid::geometric(1.0, 10.0, 4), frames(5), opts(2000, 12));
  };
  write_report(dir / "a", run());
  write_report(dir / "b", run());
  for (const char* name : {"report.csv", "summary.txt", "meta.txt"}) {
    CHECK(std::filesystem::exists(dir / "a" / name));
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
  CHECK(std::filesystem::exists(dir / "a" / "timing.txt"));
  CHECK(slurp(dir / "a" / "summary.txt").find("verdict=pass") != std::string::npos);
  std::filesystem::remove_all(dir);
}

}
