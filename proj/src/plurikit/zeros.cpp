#include "plurikit/zeros.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "plurikit/errors.hpp"

namespace plurikit {
namespace {

struct ContourSample {
  double theta = 0.0;
  Complex mantissa;
  double rate = 0.0;  // d arg f / d theta
  bool near_zero = false;
};

class ContourWalker {
 public:
  ContourWalker(const HoloFunction& f, double r, const ContourOptions& options)
      : f_(f), r_(r), options_(options) {}

  ContourSample sample(double theta) {
    if (++evaluations_ > options_.max_evaluations) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "count_zeros_disc: evaluation budget exhausted at r = " << r_;
      throw NumericFailure(msg.str());
    }
    const Complex w = std::polar(r_, theta);
    Complex grad{0.0, 0.0};
    const ScaledValue v = f_.eval(std::span<const Complex>(&w, 1), std::span<Complex>(&grad, 1));
    ContourSample s;
    s.theta = theta;
    s.mantissa = v.mantissa;
    if (!std::isfinite(v.mantissa.real()) || !std::isfinite(v.mantissa.imag()) || !std::isfinite(v.log_scale)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "count_zeros_disc: non-finite value at w = " << w << " (r = " << r_ << ")";
      throw NumericFailure(msg.str());
    }
    const double abs_f = std::abs(v.mantissa);
    const double abs_g = std::abs(grad);
    if (abs_f == 0.0 || abs_f < options_.near_zero_tol * r_ * abs_g) {
      s.near_zero = true;
    } else {
      s.rate = (w * grad / v.mantissa).real();
    }
    return s;
  }

  //! Total winding number, or nullopt when the contour grazes a zero.
  std::optional<double> winding(int initial_points, double max_step, double max_rate_step) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<ContourSample> base;
    base.reserve(static_cast<std::size_t>(initial_points) + 1);
    for (int k = 0; k <= initial_points; ++k) {
      base.push_back(k == initial_points ? base.front() : sample(two_pi * k / initial_points));
      if (base.back().near_zero) return std::nullopt;
    }
    base.back().theta = two_pi;
    double total = 0.0;
    std::vector<std::pair<ContourSample, ContourSample>> stack;
    for (int k = 0; k < initial_points; ++k) {
      stack.emplace_back(base[static_cast<std::size_t>(k)], base[static_cast<std::size_t>(k) + 1]);
      while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        const double delta = std::arg(b.mantissa / a.mantissa);
        const double width = b.theta - a.theta;
        const double rate = std::max(std::abs(a.rate), std::abs(b.rate));
        const bool fine = std::abs(delta) <= max_step && width * rate <= max_rate_step;
        if (fine || width < 1e-14) {
          total += delta;
          continue;
        }
        const ContourSample m = sample(0.5 * (a.theta + b.theta));
        if (m.near_zero) return std::nullopt;
        // push right half first so the left half is processed next
        stack.emplace_back(m, b);
        stack.emplace_back(a, m);
      }
    }
    return total / two_pi;
  }

 private:
  const HoloFunction& f_;
  double r_;
  const ContourOptions& options_;
  std::size_t evaluations_ = 0;
};

std::optional<int> count_at_radius(const HoloFunction& f, double r, const ContourOptions& options) {
  const double pi = std::numbers::pi;
  // tighten the refinement until two independent samplings agree
  for (int level = 0; level < 4; ++level) {
    const double scale = std::ldexp(1.0, -level);
    ContourWalker walker(f, r, options);
    const auto w1 = walker.winding(options.initial_points, pi / 4.0 * scale, pi / 2.0 * scale);
    if (!w1) return std::nullopt;
    const auto w2 = walker.winding(2 * options.initial_points + 1, pi / 4.0 * scale, pi / 2.0 * scale);
    if (!w2) return std::nullopt;
    const long long n1 = std::llround(*w1);
    const long long n2 = std::llround(*w2);
    const bool integral = std::abs(*w1 - static_cast<double>(n1)) < 1e-6 &&
                          std::abs(*w2 - static_cast<double>(n2)) < 1e-6;
    if (integral && n1 == n2) return static_cast<int>(n1);
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "count_zeros_disc: winding number did not stabilize at r = " << r;
  throw NumericFailure(msg.str());
}

}  // namespace

int count_zeros_disc(const HoloFunction& f, double r, const ContourOptions& options) {
  require(f.n_vars() == 1, "count_zeros_disc needs a function of one variable");
  require(std::isfinite(r) && r > 0.0, "count_zeros_disc: radius must be positive");
  require(options.initial_points >= 8, "count_zeros_disc: need at least 8 initial points");
  double radius = r;
  for (int attempt = 0; attempt <= options.max_perturbations; ++attempt) {
    if (const auto count = count_at_radius(f, radius, options)) {
      if (*count < 0) throw NumericFailure("count_zeros_disc: negative winding number");
      return *count;
    }
    radius *= 1.0 + options.perturbation;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "count_zeros_disc: zero on the contour persists after " << options.max_perturbations
      << " radius perturbations at r = " << r;
  throw NumericFailure(msg.str());
}

}  // namespace plurikit
