#include "plurikit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "plurikit/errors.hpp"
#include "plurikit/parallel.hpp"
#include "plurikit/rng.hpp"

namespace plurikit {

namespace {

constexpr std::uint64_t kFramesTag = 0x4652414D45530001ULL;
constexpr std::uint64_t kAmbientTag = 0x414D4249454E5401ULL;
constexpr std::uint64_t kSliceTag = 0x534C494345000001ULL;

constexpr double kSigmas = 3.0;
constexpr double kSuspiciousFraction = 0.01;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

ProfileOptions ambient_options(const ProfileOptions& options) {
  ProfileOptions out = options;
  out.seed = derive_seed(options.seed, kAmbientTag);
  return out;
}

ProfileOptions slice_options(const ProfileOptions& options, std::size_t frame) {
  ProfileOptions out = options;
  out.seed = derive_seed(derive_seed(options.seed, kSliceTag), frame);
  return out;
}

void record_inputs(ExperimentReport& report, const Current& current, const ProfileOptions& options) {
  report.inputs.set("current", current.kind());
  report.inputs.set("ambient_dim", current.ambient_dim());
  report.inputs.set("bidegree", current.bidegree());
  report.inputs.set("budget", options.budget);
  report.inputs.set("seed", std::to_string(options.seed));
}

void record_grid(ExperimentReport& report, const RadialGrid& grid) {
  report.inputs.set("r_min", grid.r_min());
  report.inputs.set("r_max", grid.r_max());
  report.inputs.set("points", grid.size());
}

// Slice Lelong values for every frame at the given radii; nullopt marks a
// degenerate frame.
std::vector<std::optional<RadialEstimates>> slice_values(const Current& current, const std::vector<Frame>& frames,
                                                         const std::vector<double>& radii,
                                                         const ProfileOptions& options) {
  std::vector<std::optional<RadialEstimates>> out(frames.size());
  parallel_for(frames.size(), [&](std::size_t f) {
    try {
      const Current slice = restrict_current(current, frames[f]);
      out[f] = nu_at_radii(slice, radii, slice_options(options, f));
    } catch (const DegenerateSlice&) {
      out[f].reset();
    }
  });
  return out;
}

std::size_t count_degenerate(const std::vector<std::optional<RadialEstimates>>& slices) {
  return static_cast<std::size_t>(std::count_if(slices.begin(), slices.end(), [](const auto& s) { return !s; }));
}

void record_frames(ExperimentReport& report, const std::vector<std::optional<RadialEstimates>>& slices) {
  report.total_frames = slices.size();
  report.degenerate_frames = count_degenerate(slices);
  report.summary.set("suspicious", report.degenerate_fraction() > kSuspiciousFraction);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Frame average at radius index i over non-degenerate frames (optionally
// restricted by mask); the spread across frames carries the MC noise too.
MeanSe frame_average(const std::vector<std::optional<RadialEstimates>>& slices, std::size_t i,
                     const std::vector<bool>* mask, std::size_t denominator) {
  double sum = 0.0, sum2 = 0.0;
  std::size_t used = 0;
  double single_se = 0.0;
  bool counts = true;
  for (std::size_t f = 0; f < slices.size(); ++f) {
    if (!slices[f]) continue;
    counts = counts && slices[f]->method == ProfileMethod::exact_count;
    const bool inside = mask == nullptr || (*mask)[f];
    const double v = inside ? slices[f]->values[i] : 0.0;
    sum += v;
    sum2 += v * v;
    single_se = slices[f]->standard_errors[i];
    ++used;
  }
  MeanSe out;
  if (used == 0) return out;
  const double k = static_cast<double>(denominator);
  out.mean = sum / k;
  if (used == 1) {
    out.se = single_se;
  } else {
    const double m = sum / static_cast<double>(used);
    const double var = std::max(0.0, (sum2 - static_cast<double>(used) * m * m) / static_cast<double>(used - 1));
    out.se = std::sqrt(var / static_cast<double>(used));
  }
  // Integer counts that agree on every frame give a zero sample spread even
  // though rarer counts still have positive probability: one frame off by
  // one is the resolution of the average.
  if (counts) out.se = std::max(out.se, 1.0 / static_cast<double>(used));
  return out;
}

double order_or_zero(const OrderEstimate& e) { return e.empty ? 0.0 : e.rho; }

std::size_t top_decade_begin(const std::vector<double>& radii) {
  const double lo = radii.back() / 10.0 * (1.0 - 1e-9);
  std::size_t i = radii.size() - 1;
  while (i > 0 && radii[i - 1] >= lo) --i;
  return i;
}

}  // namespace

std::vector<Frame> experiment_frames(int q, int n, const FrameOptions& frames, std::uint64_t seed) {
  if (!frames.forced.empty()) {
    for (const auto& f : frames.forced)
      require(f.ambient_dim() == n && f.sub_dim() == q, "forced frame has the wrong shape");
    return frames.forced;
  }
  require(frames.count >= 1, "need at least one frame");
  return sample_grassmannian(q, n, frames.count, derive_seed(seed, kFramesTag));
}

ExperimentReport crofton_check(const Current& current, int q, const RadialGrid& grid, const FrameOptions& frames,
                               const ProfileOptions& options, const CroftonOptions& crofton) {
  const Stopwatch clock;
  const int n = current.ambient_dim();
  require(q >= 1 && q <= n, "crofton: need 1 <= q <= n");
  require(current.bidimension() + q >= n, "crofton: need p + q >= n");
  ExperimentReport report;
  report.name = "crofton";
  record_inputs(report, current, options);
  record_grid(report, grid);
  report.inputs.set("q", q);
  report.inputs.set("frames", frames.forced.empty() ? frames.count : frames.forced.size());
  report.inputs.set("exploratory", crofton.exploratory);

  const auto lhs = nu_profile(current, grid, ambient_options(options));
  const auto frame_list = experiment_frames(q, n, frames, options.seed);
  const auto slices = slice_values(current, frame_list, grid.points(), options);
  record_frames(report, slices);
  const std::size_t good = slices.size() - report.degenerate_frames;

  report.columns = {"r", "lhs", "rhs", "stderr", "residual"};
  bool all_ok = good > 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MeanSe rhs = good > 0 ? frame_average(slices, i, nullptr, good) : MeanSe{};
    const double se = std::hypot(lhs.standard_errors[i], rhs.se);
    const double residual = lhs.values[i] - rhs.mean;
    const double tol = kSigmas * se + 1e-9 * std::max(std::abs(lhs.values[i]), std::abs(rhs.mean));
    if (std::abs(residual) > tol) all_ok = false;
    if (tol > 0.0) worst = std::max(worst, kSigmas * std::abs(residual) / tol);
    report.rows.push_back({grid[i], lhs.values[i], rhs.mean, se, residual});
  }
  report.has_verdict = !crofton.exploratory;
  report.passed = all_ok;
  report.summary.set("max_sigma_deviation", worst);
  report.summary.set("lhs_method", to_string(lhs.method));
  report.summary.set("flagged_radii", lhs.flagged.size());
  report.wall_seconds = clock.seconds();
  return report;
}

bool CapSpec::contains(const Frame& frame) const {
  if (is_everything()) return true;
  const CMatrix overlap = center.matrix().adjoint() * frame.matrix();
  return std::abs(overlap.determinant()) >= std::cos(theta);
}

bool CapSpec::is_everything() const { return theta >= std::numbers::pi / 2.0 - 1e-12; }

ExperimentReport theorem1_check(const Current& current, const CapSpec& cap, const RadialGrid& grid,
                                const FrameOptions& frames, const ProfileOptions& options) {
  const Stopwatch clock;
  const int n = current.ambient_dim();
  const int q = cap.center.sub_dim();
  require(cap.center.ambient_dim() == n, "cap: center frame dimension does not match the current");
  require(cap.theta > 0.0 && cap.theta <= std::numbers::pi / 2.0, "cap: theta must be in (0, pi/2]");
  require(current.bidimension() + q >= n, "theorem1: need p + q >= n");
  ExperimentReport report;
  report.name = "theorem1";
  record_inputs(report, current, options);
  record_grid(report, grid);
  report.inputs.set("q", q);
  report.inputs.set("theta", cap.theta);

  const auto frame_list = experiment_frames(q, n, frames, options.seed);
  std::vector<bool> inside(frame_list.size());
  std::size_t in_cap = 0;
  for (std::size_t f = 0; f < frame_list.size(); ++f) {
    inside[f] = cap.contains(frame_list[f]);
    in_cap += inside[f] ? 1 : 0;
  }
  require(in_cap > 0, "theorem1: the cap E is empty after sampling");
  const double measure = static_cast<double>(in_cap) / static_cast<double>(frame_list.size());
  report.summary.set("cap_measure", measure);

  // all frames are sliced so that E = G reproduces the Crofton run exactly
  const auto slices = slice_values(current, frame_list, grid.points(), options);
  record_frames(report, slices);
  const std::size_t good = slices.size() - report.degenerate_frames;
  require(good > 0, "theorem1: every sampled frame is degenerate");

  std::vector<MeanSe> cap_integral(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) cap_integral[i] = frame_average(slices, i, &inside, good);

  report.columns = {"r", "c2", "cap_integral", "nu_dilated", "ratio", "stderr"};
  const std::size_t top = top_decade_begin(grid.points());
  bool any = false;
  double best = 0.0;
  for (double c2 : kDilationFactors) {
    std::vector<double> radii = grid.points();
    for (auto& r : radii) r *= c2;
    const auto ambient = nu_at_radii(current, radii, ambient_options(options));
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double denom = ambient.values[i];
      const double ratio = denom > 0.0 ? cap_integral[i].mean / denom : std::numeric_limits<double>::infinity();
      const double se = denom > 0.0 ? std::hypot(cap_integral[i].se, ratio * ambient.standard_errors[i]) / denom : 0.0;
      report.rows.push_back({grid[i], c2, cap_integral[i].mean, denom, ratio, se});
      if (i >= top) {
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    const double variation = hi > 0.0 && std::isfinite(hi) ? (hi - lo) / hi : 1.0;
    const bool ok = lo > 0.0 && std::isfinite(hi) && variation <= 0.5;
    const std::string tag = format_number(c2);
    report.summary.set("c1_hat[c2=" + tag + "]", lo);
    report.summary.set("variation[c2=" + tag + "]", variation);
    report.summary.set("stable[c2=" + tag + "]", ok);
    if (ok && !any) {
      any = true;
      best = c2;
      report.summary.set("c1_hat", lo);
    }
  }
  report.summary.set("c2", any ? best : 0.0);
  if (!any) report.summary.set("c1_hat", 0.0);
  report.passed = any;
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport slice_order_survey(const Current& current, int q, const RadialGrid& grid,
                                    const FrameOptions& frames, const ProfileOptions& options) {
  const Stopwatch clock;
  const int n = current.ambient_dim();
  require(current.bidimension() + q >= n, "slice survey: need p + q >= n");
  ExperimentReport report;
  report.name = "slice_order_survey";
  record_inputs(report, current, options);
  record_grid(report, grid);
  report.inputs.set("q", q);

  const auto ambient = nu_profile(current, grid, ambient_options(options));
  const auto ambient_order = estimate_order(ambient);
  const double rho = order_or_zero(ambient_order);
  const auto frame_list = experiment_frames(q, n, frames, options.seed);
  const auto slices = slice_values(current, frame_list, grid.points(), options);
  record_frames(report, slices);

  report.columns = {"frame", "rho_slice", "deviation"};
  std::vector<double> deviations;
  for (std::size_t f = 0; f < slices.size(); ++f) {
    if (!slices[f]) continue;
    const double rho_l = order_or_zero(estimate_order(grid.points(), slices[f]->values, slices[f]->standard_errors));
    deviations.push_back(std::abs(rho_l - rho));
    report.rows.push_back({static_cast<double>(f), rho_l, deviations.back()});
  }
  report.summary.set("rho", rho);
  report.summary.set("rho_stderr", ambient_order.standard_error);
  if (deviations.empty()) {
    report.passed = false;
  } else {
    std::vector<double> sorted = deviations;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    const double median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
    const double within = static_cast<double>(std::count_if(sorted.begin(), sorted.end(), [](double d) { return d <= 0.3; })) /
                          static_cast<double>(k);
    report.summary.set("median_deviation", median);
    report.summary.set("fraction_within_0.3", within);
    report.passed = median <= 0.2 && within >= 0.9;
  }
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport ratio_degeneracy_check(const Current& current, const std::vector<double>& r_sequence,
                                        const std::vector<double>& alpha_set, const FrameOptions& frames,
                                        const ProfileOptions& options) {
  const Stopwatch clock;
  require(r_sequence.size() >= 6, "ratio check: r_sequence needs at least 6 terms");
  for (std::size_t i = 0; i < r_sequence.size(); ++i) {
    require(std::isfinite(r_sequence[i]) && r_sequence[i] > 0.0, "ratio check: radii must be positive");
    require(i == 0 || r_sequence[i] > r_sequence[i - 1], "ratio check: r_sequence must increase");
  }
  require(!alpha_set.empty(), "ratio check: alpha_set must not be empty");
  for (double a : alpha_set) require(std::isfinite(a) && a > 0.0, "ratio check: alpha values must be positive");
  const int n = current.ambient_dim();
  const int q = n - current.bidimension();
  ExperimentReport report;
  report.name = "ratio_degeneracy";
  record_inputs(report, current, options);
  report.inputs.set("q", q);
  report.inputs.set("terms", r_sequence.size());
  report.inputs.set("alphas", alpha_set.size());

  const auto ambient = nu_at_radii(current, r_sequence, ambient_options(options));
  for (std::size_t m = 0; m < r_sequence.size(); ++m)
    if (!(ambient.values[m] > 0.0))
      throw NumericFailure("ratio check: ambient Lelong function vanishes at r = " + format_number(r_sequence[m]));

  std::vector<double> radii;
  for (double a : alpha_set)
    for (double r : r_sequence) radii.push_back(a * r);
  const auto frame_list = experiment_frames(q, n, frames, options.seed);
  const auto slices = slice_values(current, frame_list, radii, options);
  record_frames(report, slices);

  report.columns = {"frame", "alpha", "m", "r", "ratio"};
  const std::size_t terms = r_sequence.size();
  std::size_t trending = 0;
  std::size_t good = 0;
  for (std::size_t f = 0; f < slices.size(); ++f) {
    if (!slices[f]) continue;
    ++good;
    bool all_alpha = true;
    for (std::size_t a = 0; a < alpha_set.size(); ++a) {
      std::vector<double> ratios(terms);
      for (std::size_t m = 0; m < terms; ++m) {
        ratios[m] = slices[f]->values[a * terms + m] / ambient.values[m];
        report.rows.push_back({static_cast<double>(f), alpha_set[a], static_cast<double>(m), r_sequence[m], ratios[m]});
      }
      const double first = ratios.front();
      const bool to_zero = std::all_of(ratios.end() - 3, ratios.end(), [&](double v) { return v <= 0.01 * first; });
      all_alpha = all_alpha && to_zero;
    }
    if (all_alpha) ++trending;
  }
  const double fraction = good == 0 ? 1.0 : static_cast<double>(trending) / static_cast<double>(good);
  report.summary.set("trending_frames", trending);
  report.summary.set("trending_fraction", fraction);
  report.passed = good > 0 && fraction <= 0.05;
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport directional_order_check(const Current& current, const ProductSpace& space, const RegionSpec& d,
                                         const RegionSpec& d_prime, const RadialGrid& grid,
                                         const ProfileOptions& options) {
  const Stopwatch clock;
  require(current.ambient_dim() == space.dim(), "directional check: current dimension does not match the space");
  require(current.bidegree() < space.n, "directional check: need bidegree k < n");
  ExperimentReport report;
  report.name = "directional_order";
  record_inputs(report, current, options);
  record_grid(report, grid);
  report.inputs.set("n", space.n);
  report.inputs.set("m", space.m);
  report.inputs.set("region_d", to_string(d.shape));
  report.inputs.set("region_d_prime", to_string(d_prime.shape));

  ProfileOptions n_opts = options, m_opts = options;
  n_opts.seed = derive_seed(options.seed, 11);
  m_opts.seed = derive_seed(options.seed, 12);
  const auto ambient = nu_profile(current, grid, ambient_options(options));
  const auto big_n = directional_N_profile(current, space, d, grid, n_opts);
  const auto big_m = directional_M_profile(current, space, d_prime, grid, m_opts);

  const double rho = order_or_zero(estimate_order(ambient));
  const double rho_n = order_or_zero(estimate_order(grid.points(), big_n.values, big_n.standard_errors));
  const double rho_m = order_or_zero(estimate_order(grid.points(), big_m.values, big_m.standard_errors));

  report.columns = {"r", "nu", "nu_stderr", "N", "N_stderr", "M", "M_stderr"};
  for (std::size_t i = 0; i < grid.size(); ++i)
    report.rows.push_back({grid[i], ambient.values[i], ambient.standard_errors[i], big_n.values[i],
                           big_n.standard_errors[i], big_m.values[i], big_m.standard_errors[i]});

  const bool proposition1 = rho_n <= 2.0 * space.m + rho + 0.1;
  const bool theorem3_applies = current.bidegree() == 1;
  const bool theorem3 = rho <= std::max(rho_n, rho_m) + 0.1;
  report.summary.set("rho", rho);
  report.summary.set("rho_N", rho_n);
  report.summary.set("rho_M", rho_m);
  report.summary.set("proposition1", proposition1);
  report.summary.set("theorem3", theorem3_applies ? std::string(theorem3 ? "true" : "false") : std::string("n/a"));
  report.passed = proposition1 && (!theorem3_applies || theorem3);
  report.wall_seconds = clock.seconds();
  return report;
}

}  // namespace plurikit
