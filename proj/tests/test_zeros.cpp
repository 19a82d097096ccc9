#include <doctest.h>

#include "plurikit/errors.hpp"
#include "plurikit/rng.hpp"
#include "plurikit/zeros.hpp"
#include "support.hpp"

using namespace plurikit;

namespace {

HoloFunction univariate(const std::vector<Complex>& c) {
  PolynomialMap map{1, {}};
  for (std::size_t i = 0; i < c.size(); ++i) map.terms.push_back({{static_cast<int>(i)}, c[i]});
  return HoloFunction::polynomial(map);
}

}  // namespace

TEST_SUITE("zeros") {

TEST_CASE("monomials") {
  for (int d = 1; d <= 6; ++d) {
    std::vector<Complex> c(static_cast<std::size_t>(d) + 1, 0.0);
    c.back() = 1.0;
    CHECK(count_zeros_disc(univariate(c), 1.0) == d);
  }
}

TEST_CASE("quadratic with one root inside") {
  // (w - 1)(w + 2)
  CHECK(count_zeros_disc(univariate({-2.0, 1.0, 1.0}), 1.5) == 1);
  CHECK(count_zeros_disc(univariate({-2.0, 1.0, 1.0}), 2.5) == 2);
  CHECK(count_zeros_disc(univariate({-2.0, 1.0, 1.0}), 0.5) == 0);
}

TEST_CASE("exp(w) - 1 has three zeros in |w| < 7") {
  const auto g = HoloFunction::custom(1, [](std::span<const Complex> z, std::span<Complex> grad) {
    const Complex e = std::exp(z[0]);
    if (!grad.empty()) grad[0] = e;
    return e - 1.0;
  });
  CHECK(count_zeros_disc(g, 7.0) == 3);
  CHECK(count_zeros_disc(g, 5.0) == 1);
  // the nearest zeros of w - e^w have modulus about 1.37
  const auto f = HoloFunction::exp_graph(1, 0, {{1.0, 0.0}});
  CHECK(count_zeros_disc(f, 1.0) == 0);
  CHECK(count_zeros_disc(f, 2.0) == 2);
}

TEST_CASE("a zero on the contour is counted") {
  CHECK(count_zeros_disc(univariate({-1.0, 1.0}), 1.0) == 1);
  CHECK(count_zeros_disc(univariate({Complex(0.0, -2.0), 1.0}), 2.0) == 1);
}

TEST_CASE("random polynomials agree with companion-matrix roots") {
  Stream s(404, 0);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + static_cast<int>(s.uniform() * 8);
    std::vector<Complex> c;
    for (int i = 0; i <= d; ++i) c.push_back(s.complex_normal());
    const double r = 0.3 + 2.0 * s.uniform();
    const auto roots = support::companion_roots(c);
    int expected = 0;
    bool near = false;
    for (const auto& z : roots) {
      if (std::abs(z) < r) ++expected;
      if (std::abs(std::abs(z) - r) < 1e-6) near = true;
    }
    if (near) continue;
    CHECK(count_zeros_disc(univariate(c), r) == expected);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("scaling the function does not change the count") {
  const auto f = univariate({Complex(0.3, 0.1), -2.0, Complex(0.0, 1.0), 0.5});
  for (double r : {0.2, 0.9, 1.7, 4.0, 9.0}) {
    CHECK(count_zeros_disc(f, r) == count_zeros_disc(f.scaled(5.0), r));
    CHECK(count_zeros_disc(f, r) == count_zeros_disc(f.scaled({0.0, 1e-8}), r));
  }
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(count_zeros_disc(univariate({1.0, 1.0}), 0.0), ConfigError);
  CHECK_THROWS_AS(count_zeros_disc(HoloFunction::exp_graph(2, 1, {{1.0, 0.0}, {0.0, 0.0}}), 1.0), ConfigError);
}

}
