#include <doctest.h>

#include "plurikit/currents.hpp"
#include "plurikit/errors.hpp"
#include "plurikit/rng.hpp"
#include "support.hpp"

using namespace plurikit;

namespace {

CVector random_point(Stream& s, int n, double scale) {
  CVector z(n);
  for (int i = 0; i < n; ++i) z(i) = scale * s.complex_normal();
  return z;
}

std::span<const Complex> view(const CVector& z) {
  return {z.data(), static_cast<std::size_t>(z.size())};
}

HoloFunction parabola() {
  // z2 - z1^2
  return HoloFunction::polynomial({2, {{{0, 1}, {1.0, 0.0}}, {{2, 0}, {-1.0, 0.0}}}});
}

std::vector<HoloFunction> sample_functions() {
  return {
      parabola(),
      HoloFunction::exp_graph(2, 1, {{1.0, 0.0}, {0.0, 0.0}}),
      HoloFunction::sin_graph(3, 0, {{0.0, 0.0}, {0.5, 0.0}, {0.0, 1.0}}, {0.1, 0.0}),
      HoloFunction::affine_product(2, {{{{1.0, 0.0}, {2.0, -1.0}}, {0.5, 0.0}},
                                       {{{0.0, 1.0}, {1.0, 0.0}}, {0.0, -0.3}}}),
  };
}

}  // namespace

TEST_SUITE("currents") {

TEST_CASE("evaluator values and gradients at fixed points") {
  const auto f = HoloFunction::polynomial({1, {{{2}, {1.0, 0.0}}}});
  CVector z(1);
  z << 3.0;
  const auto [v, g] = evaluate(f, z);
  CHECK(v == Complex(9.0, 0.0));
  CHECK(g(0) == Complex(6.0, 0.0));

  const auto e = HoloFunction::exp_graph(2, 1, {{1.0, 0.0}, {0.0, 0.0}});
  CVector p(2);
  p << 0.0, 1.0;
  const auto [ve, ge] = evaluate(e, p);
  CHECK(std::abs(ve) <= 1e-15);
  CHECK(std::abs(ge(0) - Complex(-1.0, 0.0)) <= 1e-15);
  CHECK(std::abs(ge(1) - Complex(1.0, 0.0)) <= 1e-15);
}

TEST_CASE("gradients match finite differences") {
  Stream s(31, 0);
  for (const auto& f : sample_functions()) {
    for (int trial = 0; trial < 10; ++trial) {
      const CVector z = random_point(s, f.n_vars(), 0.8);
      const auto [v, g] = evaluate(f, z);
      for (int j = 0; j < f.n_vars(); ++j) {
        const double h = 1e-6;
        CVector zp = z, zm = z;
        zp(j) += h;
        zm(j) -= h;
        const Complex fd = (evaluate(f, zp).first - evaluate(f, zm).first) / (2.0 * h);
        CHECK(std::abs(fd - g(j)) <= 1e-6 * (1.0 + std::abs(g(j))));
      }
    }
  }
}

TEST_CASE("scaled evaluation survives huge arguments") {
  const auto e = HoloFunction::exp_graph(2, 1, {{1.0, 0.0}, {0.0, 0.0}});
  CVector z(2);
  z << 2000.0, 0.0;
  const double la = e.eval(view(z)).log_abs();
  CHECK(std::isfinite(la));
  CHECK(std::abs(la - 2000.0) <= 1e-9);
  CHECK_THROWS_AS(evaluate(e, z), NumericFailure);
}

TEST_CASE("restricting the parabola to the first axis gives -w^2") {
  const Current t = Current::zero_set(parabola());
  const Current slice = restrict_current(t, Frame::standard(1, 2));
  const auto& zs = std::get<ZeroSet>(slice.variant());
  Stream s(5, 0);
  for (int i = 0; i < 20; ++i) {
    const CVector w = random_point(s, 1, 2.0);
    CHECK(std::abs(evaluate(zs.f, w).first + w(0) * w(0)) <= 1e-12 * (1.0 + std::norm(w(0))));
  }
  CHECK(slice.ambient_dim() == 1);
  CHECK(slice.bidegree() == 1);
}

TEST_CASE("kahler form restricts to the kahler form") {
  const Current beta = Current::const_form(ConstForm::kahler(2));
  for (const auto& frame : sample_grassmannian(1, 2, 20, 8)) {
    const Current slice = restrict_current(beta, frame);
    const auto& form = std::get<ConstForm>(slice.variant());
    CHECK(form.n == 1);
    CHECK(std::abs(form.coefficients(0, 0) - Complex(1.0, 0.0)) <= 1e-12);
  }
  const Current beta3 = Current::const_form(ConstForm::kahler(3));
  for (const auto& frame : sample_grassmannian(2, 3, 10, 9)) {
    const Current slice = restrict_current(beta3, frame);
    const auto& form = std::get<ConstForm>(slice.variant());
    CHECK((form.coefficients - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("a line inside the zero set is a degenerate slice") {
  const Current t = Current::zero_set(HoloFunction::affine_product(2, {{{{1.0, 0.0}, {0.0, 0.0}}, {}}}));
  CMatrix col(2, 1);
  col << 0.0, 1.0;
  CHECK_THROWS_AS(restrict_current(t, Frame::from_columns(col)), DegenerateSlice);
  CHECK_NOTHROW(restrict_current(t, Frame::standard(1, 2)));
}

TEST_CASE("restriction needs p + q >= n") {
  const Current beta2 = Current::const_form(ConstForm::general(3, 2, CMatrix::Identity(3, 3)));
  CHECK_THROWS_AS(restrict_current(beta2, Frame::standard(1, 3)), ConfigError);
  CHECK_NOTHROW(restrict_current(beta2, Frame::standard(2, 3)));
}

TEST_CASE("restriction composes") {
  const auto outer = sample_grassmannian(2, 3, 6, 12);
  const auto inner = sample_grassmannian(1, 2, 6, 13);
  const HoloFunction g = HoloFunction::sin_graph(3, 0, {{0.0, 0.0}, {0.5, 0.0}, {0.0, 1.0}}, {0.1, 0.0});
  const PshFunction u = PshFunction::log_smooth_max(3, 1, 0.5);
  Stream s(14, 0);
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const Frame composed = outer[i].compose(inner[i]);
    const Current ta = restrict_current(restrict_current(Current::zero_set(g), outer[i]), inner[i]);
    const Current tb = restrict_current(Current::zero_set(g), composed);
    const Current ua = restrict_current(restrict_current(Current::potential(u), outer[i]), inner[i]);
    const Current ub = restrict_current(Current::potential(u), composed);
    const auto& a = std::get<ZeroSet>(ta.variant());
    const auto& b = std::get<ZeroSet>(tb.variant());
    const auto& pa = std::get<Potential>(ua.variant());
    const auto& pb = std::get<Potential>(ub.variant());
    for (int k = 0; k < 5; ++k) {
      const CVector w = random_point(s, 1, 1.5);
      const Complex va = evaluate(a.f, w).first, vb = evaluate(b.f, w).first;
      CHECK(std::abs(va - vb) <= 1e-10 * (1.0 + std::abs(va)));
      CHECK(std::abs(pa.u(w) - pb.u(w)) <= 1e-10);
    }
  }
  const Current beta = Current::const_form(ConstForm::hermitian(CMatrix::Identity(3, 3) * 2.0));
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const Current ta = restrict_current(restrict_current(beta, outer[i]), inner[i]);
    const Current tb = restrict_current(beta, outer[i].compose(inner[i]));
    const auto& a = std::get<ConstForm>(ta.variant());
    const auto& b = std::get<ConstForm>(tb.variant());
    CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("positivity of the bundled families") {
  CHECK(positivity_check(Current::const_form(ConstForm::kahler(3)), 200, 1).positive);
  CHECK(positivity_check(Current::const_form(ConstForm::block_kahler(3, 0, 2)), 200, 1).positive);
  CHECK(positivity_check(Current::potential(PshFunction::log_norm(2)), 200, 1).positive);
  CHECK(positivity_check(Current::potential(PshFunction::log_smooth_max(2, 0, 1.0)), 200, 1).positive);
  CHECK(positivity_check(Current::zero_set(parabola()), 200, 1).positive);

  const auto neg = positivity_check(Current::const_form(ConstForm::hermitian(-CMatrix::Identity(2, 2))), 200, 1);
  CHECK_FALSE(neg.positive);
  CHECK_FALSE(neg.witness.empty());
  CMatrix off(2, 2);
  off << 0.0, 1.0, 1.0, 0.0;
  CHECK_FALSE(positivity_check(Current::const_form(ConstForm::hermitian(off)), 200, 1).positive);
}

TEST_CASE("restriction preserves positivity") {
  CMatrix h(3, 3);
  h << 2.0, Complex(0.5, 0.5), 0.0, Complex(0.5, -0.5), 1.0, 0.2, 0.0, 0.2, 0.3;
  const std::vector<Current> currents = {
      Current::const_form(ConstForm::kahler(3)),
      Current::const_form(ConstForm::hermitian(h)),
      Current::const_form(ConstForm::block_kahler(3, 1, 3)),
      Current::potential(PshFunction::log_norm(3)),
      Current::potential(PshFunction::log_smooth_max(3, 2, 0.7)),
  };
  for (const auto& t : currents) {
    for (const auto& frame : sample_grassmannian(2, 3, 100, 77)) {
      CHECK(positivity_check(restrict_current(t, frame), 20, 3).positive);
    }
  }
}

TEST_CASE("const form algebra") {
  CHECK(ConstForm::kahler(3).lelong_coefficient() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ConstForm::block_kahler(3, 0, 1).lelong_coefficient() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // identity coefficients are beta^2 / 2, and beta^2 / 2 ^ beta = beta^3 / 2
  CHECK(ConstForm::general(3, 2, CMatrix::Identity(3, 3)).lelong_coefficient() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ConstForm::block_kahler(3, 0, 2).block_trace(0, 2) == doctest::Approx(2.0));
  CMatrix bad(2, 2);
  bad << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 1.0;
  CHECK_THROWS_AS(ConstForm::hermitian(bad), ConfigError);
  CHECK_THROWS_AS(ConstForm::general(3, 2, CMatrix::Identity(2, 2)), ConfigError);
}

TEST_CASE("nonnegative sums") {
  const Current a = Current::const_form(ConstForm::kahler(2));
  const Current b = Current::potential(PshFunction::log_norm(2));
  const Current s = Current::nonneg_sum({{1.0, a}, {2.0, b}});
  CHECK(s.ambient_dim() == 2);
  CHECK(s.bidegree() == 1);
  CHECK_THROWS_AS(Current::nonneg_sum({{-1.0, a}}), ConfigError);
  CHECK_THROWS_AS(Current::nonneg_sum({{1.0, a}, {1.0, Current::const_form(ConstForm::kahler(3))}}), ConfigError);
}

}
