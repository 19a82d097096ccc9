#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "plurikit/geometry.hpp"
#include "plurikit/holo.hpp"

namespace plurikit {

enum class PshFamily { log_norm, norm_sq, log_smooth_max, log_abs_holo, custom, composed };

std::string to_string(PshFamily family);

namespace detail {
class PshImpl {
 public:
  virtual ~PshImpl() = default;
  virtual int n_vars() const = 0;
  virtual PshFamily family() const = 0;
  virtual double eval(std::span<const Complex> z) const = 0;
};
}  // namespace detail

/// Real-valued plurisubharmonic function u on C^n (may take -inf).
class PshFunction {
 public:
  using CustomEvaluator = std::function<double(std::span<const Complex>)>;

  //! log|z|^2
  static PshFunction log_norm(int n);
  //! |z|^2
  static PshFunction norm_sq(int n);
  //! log(|z[index]|^2 + r0^2), a smooth max of log|z_index|^2 and log r0^2.
  static PshFunction log_smooth_max(int n, int index, double r0);
  //! log|f|^2; the potential of the zero-set current [f = 0].
  static PshFunction log_abs(HoloFunction f);
  static PshFunction custom(int n, CustomEvaluator evaluator);

  int n_vars() const { return impl_->n_vars(); }
  PshFamily family() const { return impl_->family(); }
  double operator()(std::span<const Complex> z) const { return impl_->eval(z); }
  double operator()(const CVector& z) const {
    return impl_->eval(std::span<const Complex>(z.data(), static_cast<std::size_t>(z.size())));
  }

  //! w -> u(offset + map * w)
  PshFunction compose_affine(const CMatrix& map, const CVector& offset) const;
  PshFunction restrict_to(const Frame& frame) const;

 private:
  explicit PshFunction(std::shared_ptr<const detail::PshImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::PshImpl> impl_;
};

/// Complex Hessian u_{j kbar} = d^2 u / dz_j dzbar_k by central finite
/// differences of the real Hessian; Hermitian n x n.
CMatrix complex_hessian(const PshFunction& u, const CVector& z, double step = 1e-4);

//! Sum over j in [begin, end) of u_{j jbar}, i.e. a quarter of the block Laplacian.
double block_laplacian_quarter(const PshFunction& u, std::span<const Complex> z, int begin, int end,
                               double step = 1e-4);

}  // namespace plurikit
