#include "plurikit/orders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "plurikit/errors.hpp"

namespace plurikit {

namespace {

constexpr double kDecade = 10.0;
constexpr double kRelTol = 1e-9;

struct LineFit {
  double slope = 0.0;
  double standard_error = 0.0;
  double residual = 0.0;
};

// Ordinary least squares of y on x; se from per-point sigmas of y.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  double var = 0.0, rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = (x[i] - mx) / sxx;
    if (!sigma.empty()) var += c * c * sigma[i] * sigma[i];
    const double e = y[i] - (my + fit.slope * (x[i] - mx));
    rss += e * e;
  }
  fit.standard_error = std::sqrt(var);
  fit.residual = std::sqrt(rss / n);
  return fit;
}

void require_two_decades(const std::vector<double>& radii) {
  require(radii.size() >= 4, "order estimation needs at least 4 radii");
  require(radii.back() >= kDecade * kDecade * radii.front() * (1.0 - kRelTol),
          "order estimation needs at least two decades of radii");
}

// First index of the top decade.
std::size_t top_decade_begin(const std::vector<double>& radii) {
  const double lo = radii.back() / kDecade * (1.0 - kRelTol);
  std::size_t i = radii.size() - 1;
  while (i > 0 && radii[i - 1] >= lo) --i;
  return i;
}

}  // namespace

OrderEstimate estimate_order(const RadialProfile& profile) {
  return estimate_order(profile.grid.points(), profile.values, profile.standard_errors);
}

OrderEstimate estimate_order(const std::vector<double>& radii, const std::vector<double>& values,
                             const std::vector<double>& standard_errors) {
  require(values.size() == radii.size(), "order estimation: values and radii differ in length");
  require(standard_errors.empty() || standard_errors.size() == radii.size(),
          "order estimation: standard errors and radii differ in length");
  require_two_decades(radii);
  for (double v : values) require(std::isfinite(v) && v >= 0.0, "order estimation: values must be finite and >= 0");

  OrderEstimate out;
  std::size_t first = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] <= 0.0) first = i + 1;
  if (first + 3 > values.size()) {
    out.empty = true;
    out.r_lo = radii.front();
    out.r_hi = radii.back();
    return out;
  }

  const double mid = std::sqrt(radii.front() * radii.back()) * (1.0 - kRelTol);
  std::vector<std::pair<std::size_t, std::size_t>> windows;
  for (std::size_t s = first; s < radii.size(); ++s) {
    if (radii[s] < mid) continue;
    std::size_t e = s;
    while (e + 1 < radii.size() && radii[e + 1] <= kDecade * radii[s] * (1.0 + kRelTol)) ++e;
    if (radii[e] < kDecade * radii[s] * (1.0 - kRelTol)) break;
    windows.emplace_back(s, e);
  }
  if (windows.empty()) {
    // the nonzero tail is shorter than the upper half: use the top decade
    // (or whatever remains after the last zero)
    windows.emplace_back(std::max(first, top_decade_begin(radii)), radii.size() - 1);
    if (windows.back().second - windows.back().first < 2) windows.back().first = first;
  }

  bool have = false;
  for (const auto& [s, e] : windows) {
    std::vector<double> x, y, sig;
    for (std::size_t i = s; i <= e; ++i) {
      x.push_back(std::log(radii[i]));
      y.push_back(std::log(values[i]));
      if (!standard_errors.empty()) sig.push_back(standard_errors[i] / values[i]);
    }
    const LineFit fit = fit_line(x, y, sig);
    out.slope_series.push_back({radii[s], radii[e], fit.slope, fit.standard_error, fit.residual});
    if (!have || fit.slope > out.rho) {
      have = true;
      out.rho = fit.slope;
      out.r_lo = radii[s];
      out.r_hi = radii[e];
      out.fit_residual = fit.residual;
      out.standard_error = fit.standard_error;
    }
  }
  out.rho = std::max(out.rho, 0.0);
  return out;
}

bool is_algebraic(const RadialProfile& profile, double flatness_tol) {
  require(flatness_tol >= 0.0, "flatness tolerance must be nonnegative");
  const auto& radii = profile.grid.points();
  require_two_decades(radii);
  const auto begin = top_decade_begin(radii);
  const auto [lo, hi] = std::minmax_element(profile.values.begin() + static_cast<std::ptrdiff_t>(begin), profile.values.end());
  if (*hi <= 0.0) return true;
  if ((*hi - *lo) / *hi > flatness_tol) return false;
  const auto order = estimate_order(profile);
  return order.empty || order.rho <= flatness_tol;
}

ProximateOrder::ProximateOrder(Function rho, Function derivative, double limit)
    : rho_(std::move(rho)), derivative_(std::move(derivative)), limit_(limit) {
  require(static_cast<bool>(rho_), "proximate order needs an evaluator");
  require(std::isfinite(limit_), "proximate order limit must be finite");
}

ProximateOrder ProximateOrder::constant(double rho0) {
  return ProximateOrder([rho0](double) { return rho0; }, [](double) { return 0.0; }, rho0);
}

double ProximateOrder::operator()(double r) const {
  if (!(r > 0.0)) throw DomainError("proximate order evaluated at r <= 0");
  return rho_(r);
}

double ProximateOrder::derivative(double r) const {
  if (!(r > 0.0)) throw DomainError("proximate order derivative at r <= 0");
  if (derivative_) return derivative_(r);
  const double h = 1e-5 * r;
  return (rho_(r + h) - rho_(r - h)) / (2.0 * h);
}

std::vector<double> default_probe_grid() {
  std::vector<double> grid;
  for (int e = 1; e <= 300; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

ProximateOrderReport check_proximate_order(const ProximateOrder& rho, const std::vector<double>& probe_grid) {
  require(probe_grid.size() >= 4, "proximate order check needs at least 4 probe radii");
  for (std::size_t i = 0; i < probe_grid.size(); ++i) {
    require(probe_grid[i] > 1.0 && std::isfinite(probe_grid[i]), "probe radii must be finite and > 1");
    require(i == 0 || probe_grid[i] > probe_grid[i - 1], "probe radii must increase");
  }
  ProximateOrderReport report;
  for (double r : probe_grid) {
    const double gap = std::abs(rho(r) - rho.limit());
    const double drift = r * std::log(r) * rho.derivative(r);
    report.probes.push_back({r, gap, drift});
  }
  report.final_gap = report.probes.back().gap;
  report.final_drift = report.probes.back().drift;
  // the gap must shrink across the last quarter and end below tolerance
  const std::size_t tail = probe_grid.size() - std::max<std::size_t>(2, probe_grid.size() / 4);
  for (std::size_t i = tail + 1; i < report.probes.size(); ++i)
    if (report.probes[i].gap > report.probes[i - 1].gap * (1.0 + 1e-12) + 1e-15) report.failures.push_back(report.probes[i]);
  const auto& last = report.probes.back();
  if (!(last.gap < kGapTol) || !(std::abs(last.drift) < kDriftTol)) report.failures.push_back(last);
  report.passed = report.failures.empty();
  return report;
}

ProximateOrder build_chi(const ProximateOrder& rho) {
  constexpr double e = std::numbers::e;
  constexpr double kSeries = 1e-6;
  // g(r) = log(log(e - 1 + r)) / log r, written around x = r - 1
  auto g = [](double r) {
    const double x = r - 1.0;
    if (x == 0.0) return 1.0 / e;
    if (std::abs(x) < kSeries) return (1.0 + x * (0.5 - 1.0 / e)) / e;
    return std::log1p(std::log1p(x / e)) / std::log1p(x);
  };
  auto dg = [](double r) {
    const double x = r - 1.0;
    if (std::abs(x) < kSeries) return (0.5 - 1.0 / e) / e;
    const double big_l = 1.0 + std::log1p(x / e);
    const double num = std::log1p(std::log1p(x / e));
    const double den = std::log1p(x);
    const double dnum = 1.0 / (big_l * (e - 1.0 + r));
    const double dden = 1.0 / r;
    return (dnum * den - num * dden) / (den * den);
  };
  auto chi = [rho, g](double r) { return rho(r) + g(r); };
  auto dchi = [rho, dg](double r) { return rho.derivative(r) + dg(r); };
  return ProximateOrder(chi, dchi, rho.limit());
}

std::string to_string(TypeClass type_class) {
  switch (type_class) {
    case TypeClass::minimal: return "minimal";
    case TypeClass::normal: return "normal";
    case TypeClass::maximal: return "maximal";
  }
  return "unknown";
}

TypeEstimate estimate_type(const RadialProfile& profile, const ProximateOrder& rho, const TypeThresholds& thresholds) {
  const auto& radii = profile.grid.points();
  const auto begin = top_decade_begin(radii);
  TypeEstimate out;
  std::vector<double> x, y;
  for (std::size_t i = begin; i < radii.size(); ++i) {
    const double r = radii[i];
    const double v = profile.values[i];
    const double ratio = v > 0.0 ? std::exp(std::log(v) - rho(r) * std::log(r)) : 0.0;
    out.probe_radii.push_back(r);
    out.probe_values.push_back(ratio);
    out.sigma = std::max(out.sigma, ratio);
    if (ratio > 0.0 && r > std::numbers::e) {
      x.push_back(std::log(std::log(r)));
      y.push_back(std::log(ratio));
    }
  }
  if (x.size() >= 3) out.log_slope = fit_line(x, y, {}).slope;
  const bool increasing = std::is_sorted(out.probe_values.begin(), out.probe_values.end());
  if (out.sigma < thresholds.eps_min || out.log_slope < -thresholds.log_slope)
    out.type_class = TypeClass::minimal;
  else if ((increasing && out.sigma > thresholds.sigma_max) || out.log_slope > thresholds.log_slope)
    out.type_class = TypeClass::maximal;
  else
    out.type_class = TypeClass::normal;
  return out;
}

}  // namespace plurikit
