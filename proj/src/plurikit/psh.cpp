#include "plurikit/psh.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "plurikit/errors.hpp"

namespace plurikit {

std::string to_string(PshFamily family) {
  switch (family) {
    case PshFamily::log_norm: return "log_norm";
    case PshFamily::norm_sq: return "norm_sq";
    case PshFamily::log_smooth_max: return "log_smooth_max";
    case PshFamily::log_abs_holo: return "log_abs_holo";
    case PshFamily::custom: return "custom";
    case PshFamily::composed: return "composed";
  }
  return "unknown";
}

namespace {

void check_vars(int n) { require(n >= 1 && n <= kMaxDim, "psh function: n_vars out of range"); }

double norm2(std::span<const Complex> z) {
  double s = 0.0;
  for (const auto& c : z) s += std::norm(c);
  return s;
}

class LogNormImpl final : public detail::PshImpl {
 public:
  explicit LogNormImpl(int n) : n_(n) { check_vars(n); }
  int n_vars() const override { return n_; }
  PshFamily family() const override { return PshFamily::log_norm; }
  double eval(std::span<const Complex> z) const override { return std::log(norm2(z)); }

 private:
  int n_;
};

class NormSqImpl final : public detail::PshImpl {
 public:
  explicit NormSqImpl(int n) : n_(n) { check_vars(n); }
  int n_vars() const override { return n_; }
  PshFamily family() const override { return PshFamily::norm_sq; }
  double eval(std::span<const Complex> z) const override { return norm2(z); }

 private:
  int n_;
};

class LogSmoothMaxImpl final : public detail::PshImpl {
 public:
  LogSmoothMaxImpl(int n, int index, double r0) : n_(n), index_(index), r0sq_(r0 * r0) {
    check_vars(n);
    require(index >= 0 && index < n, "log_smooth_max: index out of range");
    require(std::isfinite(r0) && r0 > 0.0, "log_smooth_max: r0 must be positive");
  }
  int n_vars() const override { return n_; }
  PshFamily family() const override { return PshFamily::log_smooth_max; }
  double eval(std::span<const Complex> z) const override {
    return std::log(std::norm(z[static_cast<std::size_t>(index_)]) + r0sq_);
  }

 private:
  int n_;
  int index_;
  double r0sq_;
};

class LogAbsImpl final : public detail::PshImpl {
 public:
  explicit LogAbsImpl(HoloFunction f) : f_(std::move(f)) {}
  int n_vars() const override { return f_.n_vars(); }
  PshFamily family() const override { return PshFamily::log_abs_holo; }
  double eval(std::span<const Complex> z) const override { return 2.0 * f_.eval(z).log_abs(); }

 private:
  HoloFunction f_;
};

class CustomImpl final : public detail::PshImpl {
 public:
  CustomImpl(int n, PshFunction::CustomEvaluator f) : n_(n), f_(std::move(f)) {
    check_vars(n);
    require(static_cast<bool>(f_), "custom psh evaluator must be callable");
  }
  int n_vars() const override { return n_; }
  PshFamily family() const override { return PshFamily::custom; }
  double eval(std::span<const Complex> z) const override { return f_(z); }

 private:
  int n_;
  PshFunction::CustomEvaluator f_;
};

class ComposedImpl final : public detail::PshImpl {
 public:
  ComposedImpl(std::shared_ptr<const detail::PshImpl> inner, CMatrix map, CVector offset)
      : inner_(std::move(inner)), map_(std::move(map)), offset_(std::move(offset)) {
    require(map_.rows() == inner_->n_vars(), "compose_affine: map rows must equal n_vars");
    require(offset_.size() == map_.rows(), "compose_affine: offset length mismatch");
    require(map_.cols() >= 1 && map_.cols() <= kMaxDim, "compose_affine: bad target dimension");
  }
  int n_vars() const override { return static_cast<int>(map_.cols()); }
  PshFamily family() const override { return PshFamily::composed; }
  double eval(std::span<const Complex> w) const override {
    const auto n = map_.rows();
    const auto q = map_.cols();
    std::array<Complex, kMaxDim> z{};
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex s = offset_(i);
      for (Eigen::Index a = 0; a < q; ++a) s += map_(i, a) * w[static_cast<std::size_t>(a)];
      z[static_cast<std::size_t>(i)] = s;
    }
    return inner_->eval(std::span<const Complex>(z.data(), static_cast<std::size_t>(n)));
  }

 private:
  std::shared_ptr<const detail::PshImpl> inner_;
  CMatrix map_;
  CVector offset_;
};

// Real coordinate accessors: x_{2j} = Re z_j, x_{2j+1} = Im z_j.
void bump(std::array<Complex, kMaxDim>& z, int real_index, double h) {
  auto& c = z[static_cast<std::size_t>(real_index / 2)];
  c += (real_index % 2 == 0) ? Complex(h, 0.0) : Complex(0.0, h);
}

// Central second difference d^2 u / dx_a dx_b.
double second_partial(const PshFunction& u, std::array<Complex, kMaxDim> z, std::size_t n, int a,
                      int b, double h) {
  auto f = [&](const std::array<Complex, kMaxDim>& p) {
    return u(std::span<const Complex>(p.data(), n));
  };
  if (a == b) {
    const double f0 = f(z);
    auto zp = z, zm = z;
    bump(zp, a, h);
    bump(zm, a, -h);
    return (f(zp) - 2.0 * f0 + f(zm)) / (h * h);
  }
  auto pp = z, pm = z, mp = z, mm = z;
  bump(pp, a, h), bump(pp, b, h);
  bump(pm, a, h), bump(pm, b, -h);
  bump(mp, a, -h), bump(mp, b, h);
  bump(mm, a, -h), bump(mm, b, -h);
  return (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
}

double scaled_step(std::span<const Complex> z, double step) {
  return step * std::max(1.0, std::sqrt(norm2(z)));
}

}  // namespace

PshFunction PshFunction::log_norm(int n) { return PshFunction(std::make_shared<LogNormImpl>(n)); }
PshFunction PshFunction::norm_sq(int n) { return PshFunction(std::make_shared<NormSqImpl>(n)); }
PshFunction PshFunction::log_smooth_max(int n, int index, double r0) {
  return PshFunction(std::make_shared<LogSmoothMaxImpl>(n, index, r0));
}
PshFunction PshFunction::log_abs(HoloFunction f) {
  return PshFunction(std::make_shared<LogAbsImpl>(std::move(f)));
}
PshFunction PshFunction::custom(int n, CustomEvaluator evaluator) {
  return PshFunction(std::make_shared<CustomImpl>(n, std::move(evaluator)));
}

PshFunction PshFunction::compose_affine(const CMatrix& map, const CVector& offset) const {
  return PshFunction(std::make_shared<ComposedImpl>(impl_, map, offset));
}

PshFunction PshFunction::restrict_to(const Frame& frame) const {
  require(frame.ambient_dim() == n_vars(), "restriction: frame ambient dimension mismatch");
  return compose_affine(frame.matrix(), CVector::Zero(frame.ambient_dim()));
}

CMatrix complex_hessian(const PshFunction& u, const CVector& z, double step) {
  const int n = u.n_vars();
  require(z.size() == n, "complex_hessian: dimension mismatch");
  std::array<Complex, kMaxDim> p{};
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = z(i);
  const auto nn = static_cast<std::size_t>(n);
  const double h = scaled_step(std::span<const Complex>(p.data(), nn), step);
  Eigen::MatrixXd real_hessian(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a)
    for (int b = a; b < 2 * n; ++b) {
      const double v = second_partial(u, p, nn, a, b, h);
      real_hessian(a, b) = v;
      real_hessian(b, a) = v;
    }
  // u_{j kbar} = 1/4 [u_{xj xk} + u_{yj yk} + i (u_{xj yk} - u_{yj xk})]
  CMatrix h_c(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double re = real_hessian(2 * j, 2 * k) + real_hessian(2 * j + 1, 2 * k + 1);
      const double im = real_hessian(2 * j, 2 * k + 1) - real_hessian(2 * j + 1, 2 * k);
      h_c(j, k) = Complex(re, im) / 4.0;
    }
  return h_c;
}

double block_laplacian_quarter(const PshFunction& u, std::span<const Complex> z, int begin, int end,
                               double step) {
  const auto n = z.size();
  std::array<Complex, kMaxDim> p{};
  for (std::size_t i = 0; i < n; ++i) p[i] = z[i];
  const double h = scaled_step(z, step);
  const double f0 = u(z);
  double sum = 0.0;
  for (int a = 2 * begin; a < 2 * end; ++a) {
    auto zp = p, zm = p;
    bump(zp, a, h);
    bump(zm, a, -h);
    sum += (u(std::span<const Complex>(zp.data(), n)) - 2.0 * f0 + u(std::span<const Complex>(zm.data(), n))) /
           (h * h);
  }
  return sum / 4.0;
}

}  // namespace plurikit
