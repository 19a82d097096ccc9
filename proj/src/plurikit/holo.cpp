#include "plurikit/holo.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "plurikit/errors.hpp"
#include "plurikit/rng.hpp"

namespace plurikit {

double ScaledValue::log_abs() const {
  const double a = std::abs(mantissa);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(a) + log_scale;
}

Complex ScaledValue::value() const {
  if (log_scale == 0.0) return mantissa;
  const double a = std::abs(mantissa);
  if (a == 0.0) return {0.0, 0.0};
  return std::polar(std::exp(std::log(a) + log_scale), std::arg(mantissa));
}

std::string to_string(HoloFamily family) {
  switch (family) {
    case HoloFamily::polynomial: return "polynomial";
    case HoloFamily::exp_graph: return "exp_graph";
    case HoloFamily::sin_graph: return "sin_graph";
    case HoloFamily::affine_product: return "affine_product";
    case HoloFamily::custom: return "custom";
    case HoloFamily::composed: return "composed";
    case HoloFamily::scaled: return "scaled";
  }
  return "unknown";
}

namespace {

void check_vars(int n) {
  require(n >= 1 && n <= kMaxDim, "holomorphic function: n_vars out of range");
}

Complex dot(const std::vector<Complex>& a, std::span<const Complex> z) {
  Complex s{0.0, 0.0};
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * z[j];
  return s;
}

class PolynomialImpl final : public detail::HoloImpl {
 public:
  explicit PolynomialImpl(PolynomialMap map) : map_(std::move(map)) {
    check_vars(map_.n_vars);
    for (const auto& t : map_.terms) {
      require(static_cast<int>(t.exponents.size()) == map_.n_vars,
              "polynomial term exponent length must equal n_vars");
      for (int e : t.exponents) {
        require(e >= 0, "polynomial exponents must be nonnegative");
        max_exp_ = std::max(max_exp_, e);
      }
    }
  }
  int n_vars() const override { return map_.n_vars; }
  HoloFamily family() const override { return HoloFamily::polynomial; }

  ScaledValue eval(std::span<const Complex> z, std::span<Complex> grad) const override {
    const int n = map_.n_vars;
    // powers[j][e] = z_j^e
    std::array<std::vector<Complex>, kMaxDim> powers;
    for (int j = 0; j < n; ++j) {
      auto& p = powers[static_cast<std::size_t>(j)];
      p.resize(static_cast<std::size_t>(max_exp_) + 1);
      p[0] = 1.0;
      for (int e = 1; e <= max_exp_; ++e) p[static_cast<std::size_t>(e)] = p[static_cast<std::size_t>(e - 1)] * z[static_cast<std::size_t>(j)];
    }
    Complex value{0.0, 0.0};
    for (auto& g : grad) g = 0.0;
    for (const auto& t : map_.terms) {
      Complex mono = t.coefficient;
      for (int j = 0; j < n; ++j) mono *= powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(t.exponents[static_cast<std::size_t>(j)])];
      value += mono;
      if (!grad.empty()) {
        for (int j = 0; j < n; ++j) {
          const int e = t.exponents[static_cast<std::size_t>(j)];
          if (e == 0) continue;
          Complex d = t.coefficient * static_cast<double>(e);
          for (int i = 0; i < n; ++i) {
            const int ei = t.exponents[static_cast<std::size_t>(i)] - (i == j ? 1 : 0);
            d *= powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(ei)];
          }
          grad[static_cast<std::size_t>(j)] += d;
        }
      }
    }
    return {value, 0.0};
  }

 private:
  PolynomialMap map_;
  int max_exp_ = 0;
};

// z[index] - exp(l) with l = linear . z + constant
class ExpGraphImpl final : public detail::HoloImpl {
 public:
  ExpGraphImpl(int n, int index, std::vector<Complex> linear, Complex constant)
      : n_(n), index_(index), linear_(std::move(linear)), constant_(constant) {
    check_vars(n);
    require(index >= 0 && index < n, "exp_graph: index out of range");
    require(static_cast<int>(linear_.size()) == n, "exp_graph: linear part must have n entries");
  }
  int n_vars() const override { return n_; }
  HoloFamily family() const override { return HoloFamily::exp_graph; }

  ScaledValue eval(std::span<const Complex> z, std::span<Complex> grad) const override {
    const Complex l = dot(linear_, z) + constant_;
    const double s = l.real() > 0.0 ? l.real() : 0.0;
    const Complex e = std::exp(Complex(l.real() - s, l.imag()));  // exp(l) * exp(-s)
    const double damp = std::exp(-s);
    const Complex zi = z[static_cast<std::size_t>(index_)];
    if (!grad.empty()) {
      for (int j = 0; j < n_; ++j) grad[static_cast<std::size_t>(j)] = -linear_[static_cast<std::size_t>(j)] * e;
      grad[static_cast<std::size_t>(index_)] += damp;
    }
    return {zi * damp - e, s};
  }

 private:
  int n_;
  int index_;
  std::vector<Complex> linear_;
  Complex constant_;
};

class SinGraphImpl final : public detail::HoloImpl {
 public:
  SinGraphImpl(int n, int index, std::vector<Complex> linear, Complex constant)
      : n_(n), index_(index), linear_(std::move(linear)), constant_(constant) {
    check_vars(n);
    require(index >= 0 && index < n, "sin_graph: index out of range");
    require(static_cast<int>(linear_.size()) == n, "sin_graph: linear part must have n entries");
  }
  int n_vars() const override { return n_; }
  HoloFamily family() const override { return HoloFamily::sin_graph; }

  ScaledValue eval(std::span<const Complex> z, std::span<Complex> grad) const override {
    const Complex l = dot(linear_, z) + constant_;
    const double s = std::abs(l.imag()) > 20.0 ? std::abs(l.imag()) : 0.0;
    const Complex i1(0.0, 1.0);
    const Complex ep = std::exp(i1 * l - s);
    const Complex em = std::exp(-i1 * l - s);
    const Complex sin_l = (ep - em) / (2.0 * i1);
    const Complex cos_l = (ep + em) / 2.0;
    const double damp = std::exp(-s);
    if (!grad.empty()) {
      for (int j = 0; j < n_; ++j) grad[static_cast<std::size_t>(j)] = -linear_[static_cast<std::size_t>(j)] * cos_l;
      grad[static_cast<std::size_t>(index_)] += damp;
    }
    return {z[static_cast<std::size_t>(index_)] * damp - sin_l, s};
  }

 private:
  int n_;
  int index_;
  std::vector<Complex> linear_;
  Complex constant_;
};

class AffineProductImpl final : public detail::HoloImpl {
 public:
  AffineProductImpl(int n, std::vector<AffineForm> factors) : n_(n), factors_(std::move(factors)) {
    check_vars(n);
    require(!factors_.empty(), "affine_product needs at least one factor");
    for (const auto& f : factors_) {
      require(static_cast<int>(f.linear.size()) == n, "affine factor must have n linear coefficients");
      bool nonzero = std::abs(f.constant) > 0.0;
      for (const auto& a : f.linear) nonzero = nonzero || std::abs(a) > 0.0;
      require(nonzero, "affine factor is identically zero");
    }
  }
  int n_vars() const override { return n_; }
  HoloFamily family() const override { return HoloFamily::affine_product; }

  ScaledValue eval(std::span<const Complex> z, std::span<Complex> grad) const override {
    const std::size_t k = factors_.size();
    std::vector<Complex> unit(k);
    std::vector<double> sigma(k);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const Complex v = dot(factors_[i].linear, z) + factors_[i].constant;
      sigma[i] = std::max(1.0, std::abs(v));
      unit[i] = v / sigma[i];
      s += std::log(sigma[i]);
    }
    Complex mant{1.0, 0.0};
    for (const auto& u : unit) mant *= u;
    if (!grad.empty()) {
      std::vector<Complex> prefix(k + 1, 1.0), suffix(k + 1, 1.0);
      for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * unit[i];
      for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * unit[i];
      for (auto& g : grad) g = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const Complex others = prefix[i] * suffix[i + 1] / sigma[i];
        for (int j = 0; j < n_; ++j) grad[static_cast<std::size_t>(j)] += others * factors_[i].linear[static_cast<std::size_t>(j)];
      }
    }
    return {mant, s};
  }

 private:
  int n_;
  std::vector<AffineForm> factors_;
};

class CustomImpl final : public detail::HoloImpl {
 public:
  CustomImpl(int n, HoloFunction::CustomEvaluator f) : n_(n), f_(std::move(f)) {
    check_vars(n);
    require(static_cast<bool>(f_), "custom evaluator must be callable");
  }
  int n_vars() const override { return n_; }
  HoloFamily family() const override { return HoloFamily::custom; }
  ScaledValue eval(std::span<const Complex> z, std::span<Complex> grad) const override {
    std::array<Complex, kMaxDim> scratch{};
    std::span<Complex> g = grad.empty() ? std::span<Complex>(scratch.data(), static_cast<std::size_t>(n_)) : grad;
    return {f_(z, g), 0.0};
  }

 private:
  int n_;
  HoloFunction::CustomEvaluator f_;
};

class ComposedImpl final : public detail::HoloImpl {
 public:
  ComposedImpl(std::shared_ptr<const detail::HoloImpl> inner, CMatrix map, CVector offset)
      : inner_(std::move(inner)), map_(std::move(map)), offset_(std::move(offset)) {
    require(map_.rows() == inner_->n_vars(), "compose_affine: map rows must equal n_vars");
    require(offset_.size() == map_.rows(), "compose_affine: offset length mismatch");
    require(map_.cols() >= 1 && map_.cols() <= kMaxDim, "compose_affine: bad target dimension");
  }
  int n_vars() const override { return static_cast<int>(map_.cols()); }
  HoloFamily family() const override { return HoloFamily::composed; }

  ScaledValue eval(std::span<const Complex> w, std::span<Complex> grad) const override {
    const auto n = map_.rows();
    const auto q = map_.cols();
    std::array<Complex, kMaxDim> z{};
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex s = offset_(i);
      for (Eigen::Index a = 0; a < q; ++a) s += map_(i, a) * w[static_cast<std::size_t>(a)];
      z[static_cast<std::size_t>(i)] = s;
    }
    std::span<const Complex> zs(z.data(), static_cast<std::size_t>(n));
    if (grad.empty()) return inner_->eval(zs, {});
    std::array<Complex, kMaxDim> gz{};
    const ScaledValue v = inner_->eval(zs, std::span<Complex>(gz.data(), static_cast<std::size_t>(n)));
    for (Eigen::Index a = 0; a < q; ++a) {
      Complex s{0.0, 0.0};
      for (Eigen::Index i = 0; i < n; ++i) s += gz[static_cast<std::size_t>(i)] * map_(i, a);
      grad[static_cast<std::size_t>(a)] = s;
    }
    return v;
  }

 private:
  std::shared_ptr<const detail::HoloImpl> inner_;
  CMatrix map_;
  CVector offset_;
};

class ScaledImpl final : public detail::HoloImpl {
 public:
  ScaledImpl(std::shared_ptr<const detail::HoloImpl> inner, Complex c) : inner_(std::move(inner)), c_(c) {
    require(std::abs(c) > 0.0, "scaling constant must be nonzero");
  }
  int n_vars() const override { return inner_->n_vars(); }
  HoloFamily family() const override { return HoloFamily::scaled; }
  ScaledValue eval(std::span<const Complex> z, std::span<Complex> grad) const override {
    ScaledValue v = inner_->eval(z, grad);
    v.mantissa *= c_;
    for (auto& g : grad) g *= c_;
    return v;
  }

 private:
  std::shared_ptr<const detail::HoloImpl> inner_;
  Complex c_;
};

}  // namespace

HoloFunction HoloFunction::polynomial(PolynomialMap map) {
  return HoloFunction(std::make_shared<PolynomialImpl>(std::move(map)));
}

HoloFunction HoloFunction::exp_graph(int n_vars, int index, std::vector<Complex> linear, Complex constant) {
  return HoloFunction(std::make_shared<ExpGraphImpl>(n_vars, index, std::move(linear), constant));
}

HoloFunction HoloFunction::sin_graph(int n_vars, int index, std::vector<Complex> linear, Complex constant) {
  return HoloFunction(std::make_shared<SinGraphImpl>(n_vars, index, std::move(linear), constant));
}

HoloFunction HoloFunction::affine_product(int n_vars, std::vector<AffineForm> factors) {
  return HoloFunction(std::make_shared<AffineProductImpl>(n_vars, std::move(factors)));
}

HoloFunction HoloFunction::custom(int n_vars, CustomEvaluator evaluator) {
  return HoloFunction(std::make_shared<CustomImpl>(n_vars, std::move(evaluator)));
}

HoloFunction HoloFunction::compose_affine(const CMatrix& map, const CVector& offset) const {
  return HoloFunction(std::make_shared<ComposedImpl>(impl_, map, offset));
}

HoloFunction HoloFunction::restrict_to(const Frame& frame) const {
  require(frame.ambient_dim() == n_vars(), "restriction: frame ambient dimension mismatch");
  return compose_affine(frame.matrix(), CVector::Zero(frame.ambient_dim()));
}

HoloFunction HoloFunction::scaled(Complex c) const {
  return HoloFunction(std::make_shared<ScaledImpl>(impl_, c));
}

HoloFunction HoloFunction::dilated(double a) const {
  require(std::isfinite(a) && a > 0.0, "dilation factor must be positive");
  const int n = n_vars();
  return compose_affine(CMatrix::Identity(n, n) / a, CVector::Zero(n));
}

std::pair<Complex, CVector> evaluate(const HoloFunction& f, const CVector& z) {
  require(z.size() == f.n_vars(), "evaluate: dimension mismatch");
  CVector grad(z.size());
  const ScaledValue v = f.eval(std::span<const Complex>(z.data(), static_cast<std::size_t>(z.size())),
                               std::span<Complex>(grad.data(), static_cast<std::size_t>(grad.size())));
  const Complex value = v.value();
  const double scale = std::exp(v.log_scale);
  grad *= scale;
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) || !grad.allFinite()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "evaluator overflow at z = (";
    for (Eigen::Index i = 0; i < z.size(); ++i) msg << (i ? ", " : "") << z(i);
    msg << ")";
    throw NumericFailure(msg.str());
  }
  return {value, grad};
}

bool is_identically_zero(const HoloFunction& f) {
  const int n = f.n_vars();
  std::array<Complex, kMaxDim> z{};
  constexpr double radii[] = {0.25, 1.0, 4.0};
  constexpr double threshold = -13.0 * 2.302585092994046;  // log(1e-13)
  for (int i = 0; i < 12; ++i) {
    Stream stream(0x5EED5EEDULL, static_cast<std::uint64_t>(i));
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      z[static_cast<std::size_t>(j)] = stream.complex_normal();
      norm2 += std::norm(z[static_cast<std::size_t>(j)]);
    }
    const double r = radii[i % 3] / std::sqrt(norm2);
    for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] *= r;
    const double la = f.eval(std::span<const Complex>(z.data(), static_cast<std::size_t>(n))).log_abs();
    if (!(la < threshold)) return false;
  }
  return true;
}

}  // namespace plurikit
