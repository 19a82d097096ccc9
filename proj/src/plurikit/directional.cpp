#include "plurikit/directional.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <type_traits>
#include <variant>

#include "plurikit/errors.hpp"
#include "plurikit/forms.hpp"
#include "plurikit/parallel.hpp"
#include "plurikit/rng.hpp"

namespace plurikit {

namespace {

constexpr std::uint64_t kRegionTag = 0x524547494F4E0001ULL;
constexpr std::uint64_t kBlockTag = 0x424C4F434B000001ULL;
constexpr std::uint64_t kShellTag = 0x5348454C4C000001ULL;
constexpr std::uint64_t kOuterTag = 0x4F55544552000001ULL;

double factorial(int n) { return std::tgamma(n + 1.0); }
double pi_pow(int n) { return std::pow(std::numbers::pi, n); }

struct Accumulator {
  double sum = 0.0;
  double sum2 = 0.0;
  std::size_t count = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++count;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double standard_error() const {
    const double c = static_cast<double>(count);
    const double m = mean();
    const double var = std::max(0.0, (sum2 - c * m * m) / (c - 1.0));
    return std::sqrt(var / c);
  }
};

// Which block gets the radius r, which block is fixed by a region.
struct BlockLayout {
  int radial_begin;
  int radial_dim;
  int region_begin;
  int region_dim;
};

BlockLayout layout_for(const ProductSpace& space, Direction direction) {
  if (direction == Direction::z_block) return {0, space.n, space.n, space.m};
  return {space.n, space.m, 0, space.n};
}

void check_space(const Current& current, const ProductSpace& space) {
  require(space.n >= 1 && space.m >= 1, "product space needs n >= 1 and m >= 1");
  require(current.ambient_dim() == space.dim(), "current dimension does not match the product space");
}

using Radii = std::vector<double>;

struct Estimates {
  std::vector<double> values;
  std::vector<double> standard_errors;
  ProfileMethod method = ProfileMethod::exact;
};

Estimates empty_estimates(const Radii& radii, ProfileMethod method) {
  return Estimates{std::vector<double>(radii.size(), 0.0), std::vector<double>(radii.size(), 0.0), method};
}

// (radial-dim - k)! (region-dim)! / pi^N, the constant in front of the
// block-diagonal trace density.
double density_prefactor(const BlockLayout& lay, int k) {
  return factorial(lay.radial_dim - k) * factorial(lay.region_dim) / pi_pow(lay.radial_dim + lay.region_dim);
}

Estimates const_form_directional(const ConstForm& form, const BlockLayout& lay, const RegionSpec& region,
                                          const Radii& grid, const ProfileOptions& options) {
  const int k = form.k;
  const double density =
      density_prefactor(lay, k) * form.block_trace(lay.radial_begin, lay.radial_begin + lay.radial_dim);
  const double power = 2.0 * (lay.radial_dim - k);
  auto profile = empty_estimates(grid, options.exact_const_form ? ProfileMethod::exact : ProfileMethod::mc_volume);
  if (options.exact_const_form) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      profile.values[i] =
          density * ball_volume(lay.radial_dim, grid[i]) * region.volume() / std::pow(grid[i], power);
    return profile;
  }
  require(options.budget >= 1000, "Monte Carlo budget must be at least 1000");
  // hit-or-miss in the cube around the radial ball, shared across radii
  const std::uint64_t seed = derive_seed(options.seed, kBlockTag);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < options.budget; ++s) {
    Stream stream(seed, s);
    double norm2 = 0.0;
    for (int d = 0; d < 2 * lay.radial_dim; ++d) {
      const double x = 2.0 * stream.uniform() - 1.0;
      norm2 += x * x;
    }
    if (norm2 < 1.0) ++hits;
  }
  const double budget = static_cast<double>(options.budget);
  const double frac = static_cast<double>(hits) / budget;
  const double frac_se = std::sqrt(frac * (1.0 - frac) / budget);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double scale = density * std::pow(2.0 * r, 2 * lay.radial_dim) * region.volume() / std::pow(r, power);
    profile.values[i] = scale * frac;
    profile.standard_errors[i] = std::abs(scale) * frac_se;
  }
  return profile;
}

Estimates potential_directional(const PshFunction& u, const BlockLayout& lay, const RegionSpec& region,
                                         const Radii& grid, const ProfileOptions& options) {
  require(options.budget >= 1000, "Monte Carlo budget must be at least 1000");
  const int big_n = lay.radial_dim + lay.region_dim;
  const double pre = density_prefactor(lay, 1);
  const double power = 2.0 * (lay.radial_dim - 1);
  const std::uint64_t radial_seed = derive_seed(options.seed, kBlockTag);
  const std::uint64_t region_seed = derive_seed(options.seed, kRegionTag);
  auto profile = empty_estimates(grid, ProfileMethod::mc_volume);
  parallel_for(grid.size(), [&](std::size_t i) {
    const double r = grid[i];
    std::array<Complex, kMaxDim> point{};
    const auto radial = std::span<Complex>(point.data() + lay.radial_begin, static_cast<std::size_t>(lay.radial_dim));
    const auto fixed = std::span<Complex>(point.data() + lay.region_begin, static_cast<std::size_t>(lay.region_dim));
    Accumulator acc;
    for (std::size_t s = 0; s < options.budget; ++s) {
      unit_ball_point(radial_seed, s, radial);
      for (auto& c : radial) c *= r;
      region.sample(region_seed, s, fixed);
      const double lap = block_laplacian_quarter(u, std::span<const Complex>(point.data(), static_cast<std::size_t>(big_n)),
                                                 lay.radial_begin, lay.radial_begin + lay.radial_dim);
      if (!std::isfinite(lap)) throw NumericFailure("directional profile: non-finite Hessian of the potential");
      acc.add(lap);
    }
    const double scale = pre * ball_volume(lay.radial_dim, r) * region.volume() / std::pow(r, power);
    profile.values[i] = std::max(0.0, scale * acc.mean());
    profile.standard_errors[i] = std::abs(scale) * acc.standard_error();
  });
  return profile;
}

// Fibre-wise slicing: average the slice Lelong functions of f over points of
// the region block, weighted by (region-dim)!/pi^dim * vol(region).
Estimates zero_set_directional(const HoloFunction& f, const BlockLayout& lay, const RegionSpec& region,
                                        const Radii& grid, const ProfileOptions& options) {
  require(options.budget >= 1000, "Monte Carlo budget must be at least 1000");
  const int big_n = lay.radial_dim + lay.region_dim;
  const auto outer = std::max<std::size_t>(
      16, static_cast<std::size_t>(std::sqrt(static_cast<double>(options.budget))));
  ProfileOptions inner = options;
  inner.budget = std::max<std::size_t>(1000, options.budget / outer);

  // the fibre {fixed block = c} is parametrised by the radial block
  CMatrix map = CMatrix::Zero(big_n, lay.radial_dim);
  for (int j = 0; j < lay.radial_dim; ++j) map(lay.radial_begin + j, j) = 1.0;
  const std::uint64_t region_seed = derive_seed(options.seed, kRegionTag);

  std::vector<std::vector<double>> slices(outer);
  parallel_for(outer, [&](std::size_t s) {
    CVector offset = CVector::Zero(big_n);
    std::array<Complex, kMaxDim> fixed{};
    region.sample(region_seed, s, std::span<Complex>(fixed.data(), static_cast<std::size_t>(lay.region_dim)));
    for (int j = 0; j < lay.region_dim; ++j) offset(lay.region_begin + j) = fixed[static_cast<std::size_t>(j)];
    ProfileOptions sub = inner;
    sub.seed = derive_seed(options.seed ^ kOuterTag, s);
    const Current slice = restrict_affine(Current::zero_set(f), map, offset);
    slices[s] = nu_at_radii(slice, grid, sub).values;
  });

  const double scale = factorial(lay.region_dim) / pi_pow(lay.region_dim) * region.volume();
  auto profile = empty_estimates(grid, lay.radial_dim == 1 ? ProfileMethod::exact_count : ProfileMethod::spherical_mean);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Accumulator acc;
    for (std::size_t s = 0; s < outer; ++s) acc.add(slices[s][i]);
    profile.values[i] = scale * acc.mean();
    profile.standard_errors[i] = scale * acc.standard_error();
  }
  return profile;
}

Estimates directional_estimates(const Current& current, const ProductSpace& space, const RegionSpec& region,
                                const Radii& grid, const ProfileOptions& options, Direction dir) {
  const BlockLayout lay = layout_for(space, dir);
  return std::visit(
      [&](const auto& v) -> Estimates {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ZeroSet>) {
          return zero_set_directional(v.f, lay, region, grid, options);
        } else if constexpr (std::is_same_v<V, Potential>) {
          return potential_directional(v.u, lay, region, grid, options);
        } else if constexpr (std::is_same_v<V, ConstForm>) {
          return const_form_directional(v, lay, region, grid, options);
        } else {
          auto total = empty_estimates(grid, ProfileMethod::exact);
          std::vector<double> var(grid.size(), 0.0);
          for (std::size_t t = 0; t < v.terms.size(); ++t) {
            ProfileOptions sub = options;
            sub.seed = derive_seed(options.seed, t);
            const auto part = directional_estimates(*v.terms[t].current, space, region, grid, sub, dir);
            const double w = v.terms[t].weight;
            for (std::size_t i = 0; i < grid.size(); ++i) {
              total.values[i] += w * part.values[i];
              var[i] += w * w * part.standard_errors[i] * part.standard_errors[i];
            }
            total.method = t == 0 || total.method == part.method ? part.method : ProfileMethod::mixed;
          }
          for (std::size_t i = 0; i < grid.size(); ++i) total.standard_errors[i] = std::sqrt(var[i]);
          return total;
        }
      },
      current.variant());
}

// Sum over multi-indices containing the first z-direction of the rotated
// z-block coefficients; the alpha_z density numerator.
double shell_density(const CMatrix& h_zz, int n, int k, std::span<const Complex> z) {
  double norm2 = 0.0;
  for (const auto& c : z) norm2 += std::norm(c);
  if (k == 1) {
    Complex q = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        q += z[static_cast<std::size_t>(a)] * h_zz(a, b) * std::conj(z[static_cast<std::size_t>(b)]);
    return q.real() / norm2;
  }
  CVector v(n);
  for (int a = 0; a < n; ++a) v(a) = z[static_cast<std::size_t>(a)];
  const CMatrix c = compound(unitary_with_first_column(v), k);
  const CMatrix rotated = c.transpose() * h_zz * c.conjugate();
  const auto sets = combinations(n, k);
  double sum = 0.0;
  for (std::size_t a = 0; a < sets.size(); ++a)
    if (sets[a].front() == 0) sum += rotated(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
  return sum;
}

CMatrix z_block_coefficients(const ConstForm& form, int n) {
  const auto all = combinations(form.n, form.k);
  std::vector<Eigen::Index> keep;
  for (std::size_t a = 0; a < all.size(); ++a)
    if (all[a].back() < n) keep.push_back(static_cast<Eigen::Index>(a));
  CMatrix h(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = form.coefficients(keep[a], keep[b]);
  return h;
}

struct ShellEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

ShellEstimate shell_integral(const Current& current, const ProductSpace& space, double r1, double r2,
                             const RegionSpec& d, const ProfileOptions& options) {
  return std::visit(
      [&](const auto& v) -> ShellEstimate {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ZeroSet>) {
          throw ConfigError("lelong_jensen_check supports constant forms and potentials only");
        } else if constexpr (std::is_same_v<V, NonnegSum>) {
          ShellEstimate total;
          double var = 0.0;
          for (std::size_t t = 0; t < v.terms.size(); ++t) {
            ProfileOptions sub = options;
            sub.seed = derive_seed(options.seed, t);
            const auto part = shell_integral(*v.terms[t].current, space, r1, r2, d, sub);
            total.value += v.terms[t].weight * part.value;
            var += v.terms[t].weight * v.terms[t].weight * part.standard_error * part.standard_error;
          }
          total.standard_error = std::sqrt(var);
          return total;
        } else {
          const int n = space.n;
          const int m = space.m;
          const int big_n = n + m;
          const int k = current.bidegree();
          const double two_n = 2.0 * n;
          const double a = std::pow(r1, two_n);
          const double b = std::pow(r2, two_n);
          const double volume = std::pow(std::numbers::pi, n) * (b - a) / factorial(n) * d.volume();
          const double pre = factorial(n - k) * factorial(m) / pi_pow(big_n);
          CMatrix h_const;
          if constexpr (std::is_same_v<V, ConstForm>) h_const = z_block_coefficients(v, n);
          const std::uint64_t dir_seed = derive_seed(options.seed, kShellTag);
          const std::uint64_t rad_seed = derive_seed(options.seed, kShellTag + 1);
          const std::uint64_t region_seed = derive_seed(options.seed, kRegionTag);
          const std::size_t chunks = std::min<std::size_t>(64, options.budget);
          std::vector<Accumulator> partial(chunks);
          parallel_for(chunks, [&](std::size_t c) {
            const std::size_t lo = options.budget * c / chunks;
            const std::size_t hi = options.budget * (c + 1) / chunks;
            std::array<Complex, kMaxDim> point{};
            const auto z = std::span<Complex>(point.data(), static_cast<std::size_t>(n));
            const auto t = std::span<Complex>(point.data() + n, static_cast<std::size_t>(m));
            for (std::size_t s = lo; s < hi; ++s) {
              unit_sphere_point(dir_seed, s, z);
              const double radius = std::pow(a + Stream(rad_seed, s).uniform() * (b - a), 1.0 / two_n);
              for (auto& x : z) x *= radius;
              d.sample(region_seed, s, t);
              double numerator;
              if constexpr (std::is_same_v<V, ConstForm>) {
                numerator = shell_density(h_const, n, k, z);
              } else {
                CVector p(big_n);
                for (int j = 0; j < big_n; ++j) p(j) = point[static_cast<std::size_t>(j)];
                const CMatrix hess = complex_hessian(v.u, p);
                numerator = shell_density(hess.topLeftCorner(n, n), n, 1, z);
              }
              const double value = pre * numerator / std::pow(radius, 2.0 * (n - k));
              if (!std::isfinite(value)) throw NumericFailure("lelong_jensen_check: non-finite shell density");
              partial[c].add(value);
            }
          });
          Accumulator acc;
          for (const auto& p : partial) {
            acc.sum += p.sum;
            acc.sum2 += p.sum2;
            acc.count += p.count;
          }
          return {volume * acc.mean(), volume * acc.standard_error()};
        }
      },
      current.variant());
}

DirectionalProfile with_grid(const RadialGrid& grid, Estimates e, Direction dir) {
  return DirectionalProfile{grid, std::move(e.values), std::move(e.standard_errors), dir, e.method};
}

}  // namespace

std::string to_string(RegionShape shape) { return shape == RegionShape::ball ? "ball" : "box"; }

std::string to_string(Direction direction) { return direction == Direction::z_block ? "z-block" : "t-block"; }

double RegionSpec::volume() const {
  const int m = dim();
  if (shape == RegionShape::ball) return ball_volume(m, size);
  return std::pow(2.0 * size, 2 * m);
}

void RegionSpec::validate(int expected_dim) const {
  require(dim() == expected_dim, "region: center dimension does not match its block");
  require(std::isfinite(size) && size > 0.0, "region: size must be positive (degenerate region)");
  for (const auto& c : center) require(std::isfinite(c.real()) && std::isfinite(c.imag()), "region: center must be finite");
}

void RegionSpec::sample(std::uint64_t seed, std::uint64_t index, std::span<Complex> out) const {
  if (shape == RegionShape::ball) {
    unit_ball_point(seed, index, out);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = center[j] + size * out[j];
    return;
  }
  Stream stream(seed, index);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double x = size * (2.0 * stream.uniform() - 1.0);
    const double y = size * (2.0 * stream.uniform() - 1.0);
    out[j] = center[j] + Complex(x, y);
  }
}

RegionSpec RegionSpec::unit_ball(int dim) { return RegionSpec{RegionShape::ball, std::vector<Complex>(static_cast<std::size_t>(dim)), 1.0}; }

DirectionalProfile directional_N_profile(const Current& current, const ProductSpace& space, const RegionSpec& d,
                                         const RadialGrid& grid, const ProfileOptions& options) {
  check_space(current, space);
  d.validate(space.m);
  require(current.bidegree() < space.n, "directional N profile needs bidegree k < n");
  return with_grid(grid, directional_estimates(current, space, d, grid.points(), options, Direction::z_block),
                   Direction::z_block);
}

DirectionalProfile directional_M_profile(const Current& current, const ProductSpace& space, const RegionSpec& b,
                                         const RadialGrid& grid, const ProfileOptions& options) {
  check_space(current, space);
  b.validate(space.n);
  require(current.bidegree() <= space.m, "directional M profile needs bidegree k <= m");
  return with_grid(grid, directional_estimates(current, space, b, grid.points(), options, Direction::t_block),
                   Direction::t_block);
}

double LelongJensenReport::combined_stderr() const {
  return std::sqrt(lhs_stderr * lhs_stderr + rhs_stderr * rhs_stderr);
}

bool LelongJensenReport::within(double sigmas) const {
  const double tol = sigmas * combined_stderr() + 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
  return std::abs(residual()) <= tol;
}

LelongJensenReport lelong_jensen_check(const Current& current, const ProductSpace& space, double r1, double r2,
                                       const RegionSpec& d, const ProfileOptions& options) {
  check_space(current, space);
  d.validate(space.m);
  require(current.bidegree() < space.n, "lelong_jensen_check needs bidegree k < n");
  require(std::isfinite(r1) && std::isfinite(r2) && r1 > 0.0, "lelong_jensen_check: radii must be positive");
  require(r1 <= r2, "lelong_jensen_check: r1 must not exceed r2");
  LelongJensenReport report;
  report.r1 = r1;
  report.r2 = r2;
  if (r1 == r2) {
    // still validates the family
    ProfileOptions probe = options;
    probe.budget = 1000;
    (void)shell_integral(current, space, r1, 2.0 * r1, d, probe);
    return report;
  }
  ProfileOptions lo = options;
  ProfileOptions hi = options;
  lo.seed = derive_seed(options.seed, 1);
  hi.seed = derive_seed(options.seed, 2);
  const auto at_r1 = directional_estimates(current, space, d, {r1}, lo, Direction::z_block);
  const auto at_r2 = directional_estimates(current, space, d, {r2}, hi, Direction::z_block);
  report.lhs = at_r2.values[0] - at_r1.values[0];
  report.lhs_stderr = std::hypot(at_r2.standard_errors[0], at_r1.standard_errors[0]);
  ProfileOptions shell = options;
  shell.seed = derive_seed(options.seed, 3);
  const auto rhs = shell_integral(current, space, r1, r2, d, shell);
  report.rhs = rhs.value;
  report.rhs_stderr = rhs.standard_error;
  return report;
}

void write_directional_csv(std::ostream& out, const DirectionalProfile& profile) {
  out << "r,value,stderr,method\n";
  const std::string method = to_string(profile.method);
  for (std::size_t i = 0; i < profile.grid.size(); ++i)
    out << format_number(profile.grid[i]) << ',' << format_number(profile.values[i]) << ','
        << format_number(profile.standard_errors[i]) << ',' << method << '\n';
}

}  // namespace plurikit
