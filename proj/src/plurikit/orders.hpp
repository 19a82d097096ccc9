#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plurikit/profiles.hpp"

namespace plurikit {

struct WindowSlope {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double slope = 0.0;
  double standard_error = 0.0;
  double residual = 0.0;
};

struct OrderEstimate {
  //! Profile identically zero: the order is undefined (EmptyCurrent).
  bool empty = false;
  double rho = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double fit_residual = 0.0;
  double standard_error = 0.0;
  std::vector<WindowSlope> slope_series;
};

/// limsup of log nu / log r: the largest least-squares slope of log nu
/// against log r over one-decade windows in the upper half of the grid.
OrderEstimate estimate_order(const RadialProfile& profile);
OrderEstimate estimate_order(const std::vector<double>& radii, const std::vector<double>& values,
                             const std::vector<double>& standard_errors = {});

inline constexpr double kDefaultFlatnessTol = 0.05;

bool is_algebraic(const RadialProfile& profile, double flatness_tol = kDefaultFlatnessTol);

class ProximateOrder {
 public:
  using Function = std::function<double(double)>;

  //! derivative may be empty: central differences are used instead.
  ProximateOrder(Function rho, Function derivative, double limit);
  static ProximateOrder constant(double rho0);

  double operator()(double r) const;
  double derivative(double r) const;
  double limit() const { return limit_; }
  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }

 private:
  Function rho_;
  Function derivative_;
  double limit_;
};

struct ProbePoint {
  double r = 0.0;
  double gap = 0.0;    // |rho(r) - limit|
  double drift = 0.0;  // r log r rho'(r)
};

struct ProximateOrderReport {
  bool passed = false;
  double final_gap = 0.0;
  double final_drift = 0.0;
  std::vector<ProbePoint> probes;
  std::vector<ProbePoint> failures;
};

inline constexpr double kGapTol = 1e-2;
inline constexpr double kDriftTol = 5e-2;

//! Geometric probe grid 10 .. 1e300, far enough for log log r / log r.
std::vector<double> default_probe_grid();

ProximateOrderReport check_proximate_order(const ProximateOrder& rho, const std::vector<double>& probe_grid);

//! chi(r) = rho(r) + log(log(e - 1 + r)) / log r, chi(1) = rho(1) + 1/e.
ProximateOrder build_chi(const ProximateOrder& rho);

enum class TypeClass { minimal, normal, maximal };

std::string to_string(TypeClass type_class);

struct TypeThresholds {
  double eps_min = 1e-3;
  double sigma_max = 1e3;
  //! Slope of log(nu / r^rho) against log log r that counts as divergence.
  double log_slope = 0.5;
  bool operator==(const TypeThresholds&) const = default;
};

struct TypeEstimate {
  double sigma = 0.0;
  TypeClass type_class = TypeClass::normal;
  double log_slope = 0.0;
  std::vector<double> probe_radii;
  std::vector<double> probe_values;
};

TypeEstimate estimate_type(const RadialProfile& profile, const ProximateOrder& rho,
                           const TypeThresholds& thresholds = {});

}  // namespace plurikit
