#include "plurikit/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <variant>

#include "plurikit/errors.hpp"
#include "plurikit/parallel.hpp"
#include "plurikit/rng.hpp"

namespace plurikit {

RadialGrid RadialGrid::geometric(double r_min, double r_max, std::size_t n_points) {
  require(std::isfinite(r_min) && r_min > 0.0, "grid: r_min must be positive");
  require(std::isfinite(r_max) && r_max > r_min, "grid: r_max must exceed r_min");
  require(n_points >= 4, "grid: need at least 4 points");
  std::vector<double> points(n_points);
  const double log_min = std::log(r_min);
  const double step = (std::log(r_max) - log_min) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) points[i] = std::exp(log_min + step * static_cast<double>(i));
  points.front() = r_min;
  points.back() = r_max;
  return RadialGrid(std::move(points));
}

RadialGrid RadialGrid::from_points(std::vector<double> points) {
  require(points.size() >= 4, "grid: need at least 4 points");
  require(points.front() > 0.0 && std::isfinite(points.front()), "grid: radii must be positive");
  const double ratio = points[1] / points[0];
  for (std::size_t i = 1; i < points.size(); ++i) {
    require(std::isfinite(points[i]) && points[i] > points[i - 1], "grid: radii must be strictly increasing");
    const double ri = points[i] / points[i - 1];
    require(std::abs(ri - ratio) <= 1e-9 * ratio, "grid: radii must be geometric (constant ratio)");
  }
  return RadialGrid(std::move(points));
}

RadialGrid RadialGrid::scaled(double a) const {
  require(std::isfinite(a) && a > 0.0, "grid: scale factor must be positive");
  std::vector<double> points = points_;
  for (auto& r : points) r *= a;
  return RadialGrid(std::move(points));
}

std::string to_string(ProfileMethod method) {
  switch (method) {
    case ProfileMethod::exact_count: return "exact-count";
    case ProfileMethod::spherical_mean: return "spherical-mean";
    case ProfileMethod::mc_volume: return "mc-volume";
    case ProfileMethod::exact: return "exact";
    case ProfileMethod::mixed: return "mixed";
  }
  return "unknown";
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_profile_csv(std::ostream& out, const RadialProfile& profile) {
  out << "r,value,stderr,method\n";
  const std::string method = to_string(profile.method);
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    out << format_number(profile.grid[i]) << ',' << format_number(profile.values[i]) << ','
        << format_number(profile.standard_errors[i]) << ',' << method << '\n';
  }
}

namespace {

constexpr std::uint64_t kSphereTag = 0x5350484552450001ULL;
constexpr std::uint64_t kCubeTag = 0x43554245564F4C01ULL;
constexpr int kStencil = 5;

void check_budget(std::size_t budget) {
  require(budget >= 1000, "Monte Carlo budget must be at least 1000");
}

void throw_non_finite(double r, double value) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "potential evaluated to " << value << " on the sphere of radius " << r;
  throw NumericFailure(msg.str());
}

// Unit-sphere directions shared by every grid point (common random numbers).
std::vector<Complex> sphere_directions(int n, std::size_t count, std::uint64_t seed) {
  std::vector<Complex> dirs(static_cast<std::size_t>(n) * count);
  for (std::size_t s = 0; s < count; ++s)
    unit_sphere_point(seed, s, std::span<Complex>(dirs.data() + s * static_cast<std::size_t>(n), static_cast<std::size_t>(n)));
  return dirs;
}

struct SmoothedDerivative {
  double slope = 0.0;
  double standard_error = 0.0;
};

// Weighted local linear regression of lambda against log r on a 5-point
// stencil around r; slope and its standard error from per-sample
// contributions (exact for the shared-direction estimator).
SmoothedDerivative log_derivative(const PshFunction& u, int n, double r, const std::vector<Complex>& dirs,
                                  std::size_t count, double step) {
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> values(count * kStencil);
  std::array<Complex, kMaxDim> z{};
  std::array<double, kStencil> radius{};
  std::array<double, kStencil> offset{};
  for (int j = 0; j < kStencil; ++j) {
    offset[static_cast<std::size_t>(j)] = (j - kStencil / 2) * step;
    radius[static_cast<std::size_t>(j)] = r * std::exp(offset[static_cast<std::size_t>(j)]);
  }
  std::array<double, kStencil> sum{}, sum2{};
  for (std::size_t s = 0; s < count; ++s) {
    const Complex* dir = dirs.data() + s * nn;
    for (int j = 0; j < kStencil; ++j) {
      const double rj = radius[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < nn; ++i) z[i] = rj * dir[i];
      const double v = u(std::span<const Complex>(z.data(), nn));
      if (!std::isfinite(v)) throw_non_finite(rj, v);
      values[s * kStencil + static_cast<std::size_t>(j)] = v;
      sum[static_cast<std::size_t>(j)] += v;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(count);
  std::array<double, kStencil> mean{}, var{};
  for (int j = 0; j < kStencil; ++j) mean[static_cast<std::size_t>(j)] = sum[static_cast<std::size_t>(j)] * inv_n;
  for (std::size_t s = 0; s < count; ++s)
    for (int j = 0; j < kStencil; ++j) {
      const double d = values[s * kStencil + static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)];
      sum2[static_cast<std::size_t>(j)] += d * d;
    }
  // A variance at the rounding floor carries no information about the
  // noise, so 1/var weights would be arbitrary; fall back to equal weights.
  bool weighted = true;
  for (int j = 0; j < kStencil; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    var[jj] = sum2[jj] / static_cast<double>(count - 1) * inv_n;
    const double floor = 1e-10 * std::max(1.0, std::abs(mean[jj]));
    weighted = weighted && var[jj] > floor * floor;
  }
  std::array<double, kStencil> w{};
  for (int j = 0; j < kStencil; ++j) w[static_cast<std::size_t>(j)] = weighted ? 1.0 / var[static_cast<std::size_t>(j)] : 1.0;
  double sw = 0.0, swx = 0.0;
  for (int j = 0; j < kStencil; ++j) {
    sw += w[static_cast<std::size_t>(j)];
    swx += w[static_cast<std::size_t>(j)] * offset[static_cast<std::size_t>(j)];
  }
  const double xbar = swx / sw;
  double sxx = 0.0;
  for (int j = 0; j < kStencil; ++j) {
    const double d = offset[static_cast<std::size_t>(j)] - xbar;
    sxx += w[static_cast<std::size_t>(j)] * d * d;
  }
  std::array<double, kStencil> c{};
  for (int j = 0; j < kStencil; ++j)
    c[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)] * (offset[static_cast<std::size_t>(j)] - xbar) / sxx;
  SmoothedDerivative out;
  for (int j = 0; j < kStencil; ++j) out.slope += c[static_cast<std::size_t>(j)] * mean[static_cast<std::size_t>(j)];
  double gsum2 = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    double g = 0.0;
    for (int j = 0; j < kStencil; ++j)
      g += c[static_cast<std::size_t>(j)] * (values[s * kStencil + static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)]);
    gsum2 += g * g;
  }
  out.standard_error = std::sqrt(gsum2 / static_cast<double>(count - 1) * inv_n);
  return out;
}

RadialEstimates spherical_profile(const PshFunction& u, const std::vector<double>& grid, const ProfileOptions& options) {
  check_budget(options.budget);
  require(options.stencil_step > 0.0 && options.stencil_step < 1.0, "stencil step must be in (0, 1)");
  const int n = u.n_vars();
  const auto dirs = sphere_directions(n, options.budget, derive_seed(options.seed, kSphereTag));
  RadialEstimates profile{std::vector<double>(grid.size()), std::vector<double>(grid.size()),
                          ProfileMethod::spherical_mean, {}};
  parallel_for(grid.size(), [&](std::size_t i) {
    const auto d = log_derivative(u, n, grid[i], dirs, options.budget, options.stencil_step);
    // nu = (r/2) d lambda / dr = (1/2) d lambda / d log r
    profile.values[i] = 0.5 * d.slope;
    profile.standard_errors[i] = 0.5 * d.standard_error;
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (profile.values[i] < -3.0 * profile.standard_errors[i]) profile.flagged.push_back(i);
    // nu >= 0; negative values within noise are clamped
    profile.values[i] = std::max(profile.values[i], 0.0);
  }
  return profile;
}

RadialEstimates const_form_profile(const ConstForm& form, const std::vector<double>& grid, const ProfileOptions& options) {
  const double coefficient = form.lelong_coefficient();
  const int n = form.n;
  const int p = form.n - form.k;
  RadialEstimates profile{std::vector<double>(grid.size()), std::vector<double>(grid.size(), 0.0),
                          ProfileMethod::exact, {}};
  if (options.exact_const_form) {
    for (std::size_t i = 0; i < grid.size(); ++i) profile.values[i] = coefficient * std::pow(grid[i], 2 * form.k);
    return profile;
  }
  check_budget(options.budget);
  profile.method = ProfileMethod::mc_volume;
  // hit-or-miss volume of the unit ball inside [-1,1]^{2n}; scaled per radius
  const std::uint64_t seed = derive_seed(options.seed, kCubeTag);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < options.budget; ++s) {
    Stream stream(seed, s);
    double norm2 = 0.0;
    for (int d = 0; d < 2 * n; ++d) {
      const double x = 2.0 * stream.uniform() - 1.0;
      norm2 += x * x;
    }
    if (norm2 < 1.0) ++hits;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(options.budget);
  const double frac_se = std::sqrt(frac * (1.0 - frac) / static_cast<double>(options.budget));
  // T ^ beta^p = (n-k)! tr(H) dlambda / pi^n
  const double density = std::tgamma(p + 1.0) * form.block_trace(0, n) / std::pow(std::numbers::pi, n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double cube = std::pow(2.0 * r, 2 * n);
    const double norm = density * cube / std::pow(r, 2 * p);
    profile.values[i] = norm * frac;
    profile.standard_errors[i] = std::abs(norm) * frac_se;
  }
  return profile;
}

}  // namespace

RadialEstimates count_at_radii(const HoloFunction& f, const std::vector<double>& grid, const ProfileOptions& options) {
  require(f.n_vars() == 1, "count_profile needs a function of one variable");
  RadialEstimates profile{std::vector<double>(grid.size()), std::vector<double>(grid.size(), 0.0),
                          ProfileMethod::exact_count, {}};
  parallel_for(grid.size(), [&](std::size_t i) {
    const double r = grid[i] * (1.0 + options.tie_perturbation);
    profile.values[i] = static_cast<double>(count_zeros_disc(f, r, options.contour));
  });
  return profile;
}

MeanEstimate spherical_mean(const PshFunction& u, int n, double r, std::size_t budget, std::uint64_t seed) {
  require(u.n_vars() == n, "spherical_mean: dimension mismatch");
  require(std::isfinite(r) && r > 0.0, "spherical_mean: radius must be positive");
  check_budget(budget);
  const auto nn = static_cast<std::size_t>(n);
  std::array<Complex, kMaxDim> z{};
  double sum = 0.0, sum2 = 0.0;
  const std::uint64_t stream_seed = derive_seed(seed, kSphereTag);
  // Welford-free two-moment accumulation is fine at these magnitudes
  double shift = 0.0;
  for (std::size_t s = 0; s < budget; ++s) {
    unit_sphere_point(stream_seed, s, std::span<Complex>(z.data(), nn));
    for (std::size_t i = 0; i < nn; ++i) z[i] *= r;
    const double v = u(std::span<const Complex>(z.data(), nn));
    if (!std::isfinite(v)) throw_non_finite(r, v);
    if (s == 0) shift = v;
    sum += v - shift;
    sum2 += (v - shift) * (v - shift);
  }
  const double count = static_cast<double>(budget);
  const double mean = sum / count;
  const double var = std::max(0.0, (sum2 - count * mean * mean) / (count - 1.0));
  return {mean + shift, std::sqrt(var / count)};
}

RadialEstimates nu_at_radii(const Current& current, const std::vector<double>& grid, const ProfileOptions& options) {
  for (double r : grid) require(std::isfinite(r) && r > 0.0, "radii must be positive and finite");
  return std::visit(
      [&](const auto& v) -> RadialEstimates {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ZeroSet>) {
          if (v.f.n_vars() == 1) return count_at_radii(v.f, grid, options);
          return spherical_profile(PshFunction::log_abs(v.f), grid, options);
        } else if constexpr (std::is_same_v<V, Potential>) {
          return spherical_profile(v.u, grid, options);
        } else if constexpr (std::is_same_v<V, ConstForm>) {
          return const_form_profile(v, grid, options);
        } else {
          RadialEstimates total{std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0),
                                ProfileMethod::exact, {}};
          std::vector<double> var(grid.size(), 0.0);
          bool first = true;
          for (std::size_t t = 0; t < v.terms.size(); ++t) {
            ProfileOptions sub = options;
            sub.seed = derive_seed(options.seed, t);
            const auto part = nu_at_radii(*v.terms[t].current, grid, sub);
            const double w = v.terms[t].weight;
            for (std::size_t i = 0; i < grid.size(); ++i) {
              total.values[i] += w * part.values[i];
              var[i] += w * w * part.standard_errors[i] * part.standard_errors[i];
            }
            total.method = first || total.method == part.method ? part.method : ProfileMethod::mixed;
            first = false;
            total.flagged.insert(total.flagged.end(), part.flagged.begin(), part.flagged.end());
          }
          for (std::size_t i = 0; i < grid.size(); ++i) total.standard_errors[i] = std::sqrt(var[i]);
          std::sort(total.flagged.begin(), total.flagged.end());
          total.flagged.erase(std::unique(total.flagged.begin(), total.flagged.end()), total.flagged.end());
          return total;
        }
      },
      current.variant());
}

namespace {

RadialProfile with_grid(const RadialGrid& grid, RadialEstimates e) {
  return RadialProfile{grid, std::move(e.values), std::move(e.standard_errors), e.method, std::move(e.flagged)};
}

}  // namespace

RadialProfile nu_profile(const Current& current, const RadialGrid& grid, const ProfileOptions& options) {
  return with_grid(grid, nu_at_radii(current, grid.points(), options));
}

RadialProfile count_profile(const HoloFunction& f, const RadialGrid& grid, const ProfileOptions& options) {
  return with_grid(grid, count_at_radii(f, grid.points(), options));
}

RadialProfile slice_profile(const Current& current, const Frame& frame, const RadialGrid& grid,
                            const ProfileOptions& options) {
  return nu_profile(restrict_current(current, frame), grid, options);
}

}  // namespace plurikit
