#include <doctest.h>

#include <numbers>
#include <sstream>

#include "plurikit/directional.hpp"
#include "plurikit/errors.hpp"
#include "support.hpp"

using namespace plurikit;

namespace {

const ProductSpace kSpace{2, 1};

Current beta_z() { return Current::const_form(ConstForm::block_kahler(3, 0, 2)); }
Current beta_t() { return Current::const_form(ConstForm::block_kahler(3, 2, 3)); }

ProfileOptions opts(std::size_t budget, std::uint64_t seed) {
  ProfileOptions o;
  o.budget = budget;
  o.seed = seed;
  return o;
}

HoloFunction affine(std::vector<Complex> linear, Complex constant = {}) {
  const int n = static_cast<int>(linear.size());
  return HoloFunction::affine_product(n, {{std::move(linear), constant}});
}

}  // namespace

TEST_SUITE("directional") {

TEST_CASE("regions") {
  const RegionSpec ball = RegionSpec::unit_ball(2);
  CHECK(ball.volume() == doctest::Approx(std::pow(std::numbers::pi, 2) / 2.0));
  RegionSpec box{RegionShape::box, {0.0}, 1.0};
  CHECK(box.volume() == doctest::Approx(4.0));
  RegionSpec flat{RegionShape::ball, {0.0}, 0.0};
  CHECK_THROWS_AS(flat.validate(1), ConfigError);
  CHECK_THROWS_AS(ball.validate(1), ConfigError);
}

TEST_CASE("N of beta_z is r^2 and N of beta_t vanishes") {
  const auto grid = RadialGrid::geometric(1.0, 100.0, 5);
  const auto d = RegionSpec::unit_ball(1);
  const auto pz = directional_N_profile(beta_z(), kSpace, d, grid, opts(20000, 1));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r2 = grid[i] * grid[i];
    CHECK(std::abs(pz.values[i] - r2) <= 3.0 * pz.standard_errors[i] + 1e-9 * r2);
  }
  const auto pt = directional_N_profile(beta_t(), kSpace, d, grid, opts(20000, 1));
  for (double v : pt.values) CHECK(v == 0.0);
}

TEST_CASE("M of the kahler sum picks the t component") {
  const auto grid = RadialGrid::geometric(1.0, 100.0, 5);
  const auto b = RegionSpec::unit_ball(2);
  const Current sum = Current::nonneg_sum({{1.0, beta_z()}, {1.0, beta_t()}});
  const auto p = directional_M_profile(sum, kSpace, b, grid, opts(20000, 2));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r2 = grid[i] * grid[i];
    CHECK(std::abs(p.values[i] - r2) <= 3.0 * p.standard_errors[i] + 1e-9 * r2);
  }
  const auto pz = directional_M_profile(beta_z(), kSpace, b, grid, opts(20000, 2));
  for (double v : pz.values) CHECK(v == 0.0);
}

TEST_CASE("zero sets through fibre slicing") {
  const auto grid = RadialGrid::geometric(0.25, 4.0, 5);
  // z1 = 0 meets every z-fibre in one point: N = 1
  const auto n1 = directional_N_profile(Current::zero_set(affine({1.0, 0.0, 0.0})), kSpace, RegionSpec::unit_ball(1), grid,
                                        opts(10000, 3));
  for (double v : n1.values) CHECK(std::abs(v - 1.0) <= 1e-2);

  // t = z1 meets the t-fibre over z in B_2(1) at t = z1, inside B_1(r) once r >= 1
  const auto m1 = directional_M_profile(Current::zero_set(affine({-1.0, 0.0, 1.0})), kSpace, RegionSpec::unit_ball(2), grid,
                                        opts(10000, 4));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] >= 1.0) CHECK(std::abs(m1.values[i] - 1.0) <= 3.0 * m1.standard_errors[i] + 1e-2);
  }
  CHECK(m1.values.front() < 0.2);

  // z1 = 0 contains whole t-fibres: no isolated intersections
  const auto m0 = directional_M_profile(Current::zero_set(affine({1.0, 0.0, 0.0})), kSpace, RegionSpec::unit_ball(2), grid,
                                        opts(10000, 5));
  for (double v : m0.values) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("bidegree limits") {
  const auto grid = RadialGrid::geometric(1.0, 10.0, 4);
  const Current top = Current::const_form(ConstForm::general(3, 2, CMatrix::Identity(3, 3)));
  CHECK_THROWS_AS(directional_N_profile(top, kSpace, RegionSpec::unit_ball(1), grid, opts(1000, 0)), ConfigError);
  CHECK_THROWS_AS(directional_M_profile(top, kSpace, RegionSpec::unit_ball(2), grid, opts(1000, 0)), ConfigError);
  CHECK_THROWS_AS(directional_N_profile(beta_z(), ProductSpace{1, 1}, RegionSpec::unit_ball(1), grid, opts(1000, 0)),
                  ConfigError);
}

TEST_CASE("Lelong-Jensen balance") {
  const auto d = RegionSpec::unit_ball(1);
  const Current sum = Current::nonneg_sum({{1.0, beta_z()}, {1.0, beta_t()}});
  const auto rep = lelong_jensen_check(sum, kSpace, 1.0, 2.0, d, opts(200000, 7));
  CHECK(rep.lhs == doctest::Approx(3.0).epsilon(0.05));
  CHECK(rep.within(3.0));

  const Current pot = Current::potential(PshFunction::log_smooth_max(3, 0, 1.0));
  const auto rp = lelong_jensen_check(pot, kSpace, 0.5, 3.0, d, opts(100000, 8));
  CHECK(rp.within(3.0));

  const auto same = lelong_jensen_check(sum, kSpace, 2.0, 2.0, d, opts(1000, 9));
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  CHECK(same.residual() == 0.0);

  CHECK_THROWS_AS(lelong_jensen_check(sum, kSpace, 2.0, 1.0, d, opts(1000, 9)), ConfigError);
  CHECK_THROWS_AS(lelong_jensen_check(Current::zero_set(affine({1.0, 0.0, 0.0})), kSpace, 1.0, 2.0, d, opts(1000, 9)),
                  ConfigError);
}

TEST_CASE("directional csv") {
  const auto p = directional_N_profile(beta_z(), kSpace, RegionSpec::unit_ball(1), RadialGrid::geometric(1.0, 2.0, 4),
                                       opts(1000, 1));
  std::ostringstream out;
  write_directional_csv(out, p);
  CHECK(out.str().find('\n') != std::string::npos);
  CHECK(out.str().find('\r') == std::string::npos);
}

}
