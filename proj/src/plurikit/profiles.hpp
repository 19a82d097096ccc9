#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "plurikit/currents.hpp"
#include "plurikit/zeros.hpp"

namespace plurikit {

/// Strictly increasing geometric grid of radii.
class RadialGrid {
 public:
  static RadialGrid geometric(double r_min, double r_max, std::size_t n_points);
  //! Accepts any strictly increasing positive list with a constant ratio.
  static RadialGrid from_points(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double r_min() const { return points_.front(); }
  double r_max() const { return points_.back(); }
  //! Every radius multiplied by a.
  RadialGrid scaled(double a) const;

  bool operator==(const RadialGrid&) const = default;

 private:
  explicit RadialGrid(std::vector<double> points) : points_(std::move(points)) {}
  std::vector<double> points_;
};

enum class ProfileMethod { exact_count, spherical_mean, mc_volume, exact, mixed };

std::string to_string(ProfileMethod method);

struct RadialProfile {
  RadialGrid grid;
  std::vector<double> values;
  std::vector<double> standard_errors;
  ProfileMethod method = ProfileMethod::exact;
  //! Grid indices whose smoothed derivative came out negative beyond 3 sigma.
  std::vector<std::size_t> flagged;
};

//! Profile values at arbitrary radii (no grid attached).
struct RadialEstimates {
  std::vector<double> values;
  std::vector<double> standard_errors;
  ProfileMethod method = ProfileMethod::exact;
  std::vector<std::size_t> flagged;
};

struct ProfileOptions {
  std::size_t budget = 100'000;
  std::uint64_t seed = 0;
  //! Closed form instead of Monte Carlo volume for constant forms.
  bool exact_const_form = false;
  //! Spacing (in log r) of the 5-point local regression stencil.
  double stencil_step = 0.02;
  //! Relative outward shift applied to radii of counting profiles, so that
  //! zeros on |w| = r are counted (right-continuous profile).
  double tie_perturbation = 1e-9;
  ContourOptions contour;
};

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

//! Monte Carlo average of u over the sphere |z| = r in C^n.
MeanEstimate spherical_mean(const PshFunction& u, int n, double r, std::size_t budget, std::uint64_t seed);

/// nu_T(r) = r^{-2p} * mass of T ^ beta^p on B(r).
///
/// Zero sets and potentials go through the spherical-mean form of the
/// Lelong-Jensen identity, nu(r) = (1/2) d lambda / d log r with lambda the
/// mean of the potential over |z| = r; zero sets in one variable are counted
/// exactly; constant forms use a Monte Carlo (or closed-form) volume.
RadialProfile nu_profile(const Current& current, const RadialGrid& grid, const ProfileOptions& options);

//! Same estimator at any list of positive radii.
RadialEstimates nu_at_radii(const Current& current, const std::vector<double>& radii, const ProfileOptions& options);
RadialEstimates count_at_radii(const HoloFunction& f, const std::vector<double>& radii, const ProfileOptions& options);

//! nu of T restricted to the subspace of frame.
RadialProfile slice_profile(const Current& current, const Frame& frame, const RadialGrid& grid,
                            const ProfileOptions& options);

//! Counting profile of a one-variable function: zeros in the closed disc.
RadialProfile count_profile(const HoloFunction& f, const RadialGrid& grid, const ProfileOptions& options);

//! Writes `r,value,stderr,method` with 17 significant digits.
void write_profile_csv(std::ostream& out, const RadialProfile& profile);

//! 17-significant-digit decimal used by every CSV writer.
std::string format_number(double value);

}  // namespace plurikit
