#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plurikit/geometry.hpp"

namespace plurikit {

/// A complex number stored as mantissa * exp(log_scale), so that entire
/// functions like z2 - exp(z1) can be evaluated far outside double range.
struct ScaledValue {
  Complex mantissa{0.0, 0.0};
  double log_scale = 0.0;

  //! log|value|; -inf at an exact zero.
  double log_abs() const;
  //! Unscaled value; +/-inf components on overflow.
  Complex value() const;
};

struct PolynomialTerm {
  std::vector<int> exponents;
  Complex coefficient;
  bool operator==(const PolynomialTerm&) const = default;
};

struct PolynomialMap {
  int n_vars = 1;
  std::vector<PolynomialTerm> terms;
  bool operator==(const PolynomialMap&) const = default;
};

//! One factor (linear . z + constant) of an affine product.
struct AffineForm {
  std::vector<Complex> linear;
  Complex constant;
  bool operator==(const AffineForm&) const = default;
};

enum class HoloFamily { polynomial, exp_graph, sin_graph, affine_product, custom, composed, scaled };

std::string to_string(HoloFamily family);

namespace detail {
class HoloImpl {
 public:
  virtual ~HoloImpl() = default;
  virtual int n_vars() const = 0;
  virtual HoloFamily family() const = 0;
  //! grad may be empty; otherwise it receives the gradient scaled by
  //! exp(-log_scale) of the returned value.
  virtual ScaledValue eval(std::span<const Complex> z, std::span<Complex> grad) const = 0;
};
}  // namespace detail

/// An entire function on C^n with value and holomorphic gradient.
/// Immutable and cheap to copy; safe to evaluate concurrently.
class HoloFunction {
 public:
  using CustomEvaluator =
      std::function<Complex(std::span<const Complex> z, std::span<Complex> grad)>;

  static HoloFunction polynomial(PolynomialMap map);
  //! z[index] - exp(linear . z + constant)
  static HoloFunction exp_graph(int n_vars, int index, std::vector<Complex> linear,
                                Complex constant = {});
  //! z[index] - sin(linear . z + constant)
  static HoloFunction sin_graph(int n_vars, int index, std::vector<Complex> linear,
                                Complex constant = {});
  static HoloFunction affine_product(int n_vars, std::vector<AffineForm> factors);
  static HoloFunction custom(int n_vars, CustomEvaluator evaluator);

  int n_vars() const { return impl_->n_vars(); }
  HoloFamily family() const { return impl_->family(); }

  ScaledValue eval(std::span<const Complex> z) const { return impl_->eval(z, {}); }
  ScaledValue eval(std::span<const Complex> z, std::span<Complex> grad) const {
    return impl_->eval(z, grad);
  }

  //! w -> f(offset + map * w); map is n x q.
  HoloFunction compose_affine(const CMatrix& map, const CVector& offset) const;
  //! w -> f(F w)
  HoloFunction restrict_to(const Frame& frame) const;
  //! z -> c * f(z), c != 0
  HoloFunction scaled(Complex c) const;
  //! z -> f(z / a), a > 0
  HoloFunction dilated(double a) const;

 private:
  explicit HoloFunction(std::shared_ptr<const detail::HoloImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::HoloImpl> impl_;
};

//! Unscaled value and gradient. Throws NumericFailure (with the point) if
//! either overflows.
std::pair<Complex, CVector> evaluate(const HoloFunction& f, const CVector& z);

//! Probes f at deterministic points of several radii; true when every probe
//! vanishes to round-off.
bool is_identically_zero(const HoloFunction& f);

}  // namespace plurikit
