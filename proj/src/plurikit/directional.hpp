#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plurikit/currents.hpp"
#include "plurikit/profiles.hpp"

namespace plurikit {

/// C^N = C^n x C^m with coordinates (z, t); z comes first.
struct ProductSpace {
  int n = 1;
  int m = 1;
  int dim() const { return n + m; }
  bool operator==(const ProductSpace&) const = default;
};

enum class RegionShape { ball, box };

std::string to_string(RegionShape shape);

/// Relatively compact region in one block: a Euclidean ball of radius
/// `size`, or the real cube of half-side `size`, around `center`.
struct RegionSpec {
  RegionShape shape = RegionShape::ball;
  std::vector<Complex> center;
  double size = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const;
  void validate(int expected_dim) const;
  //! The index-th point of the uniform (seed) stream on the region.
  void sample(std::uint64_t seed, std::uint64_t index, std::span<Complex> out) const;

  static RegionSpec unit_ball(int dim);
  bool operator==(const RegionSpec&) const = default;
};

enum class Direction { z_block, t_block };

std::string to_string(Direction direction);

struct DirectionalProfile {
  RadialGrid grid;
  std::vector<double> values;
  std::vector<double> standard_errors;
  Direction direction = Direction::z_block;
  ProfileMethod method = ProfileMethod::exact;
};

/// N(r) = r^{-2(n-k)} * mass of T ^ beta_z^{n-k} ^ beta_t^m on B_n(r) x D.
DirectionalProfile directional_N_profile(const Current& current, const ProductSpace& space, const RegionSpec& d,
                                         const RadialGrid& grid, const ProfileOptions& options);

/// M(r) = r^{-2(m-k)} * mass of T ^ beta_z^n ^ beta_t^{m-k} on B x B_m(r).
DirectionalProfile directional_M_profile(const Current& current, const ProductSpace& space, const RegionSpec& b,
                                         const RadialGrid& grid, const ProfileOptions& options);

struct LelongJensenReport {
  double r1 = 0.0;
  double r2 = 0.0;
  //! N(r2) - N(r1)
  double lhs = 0.0;
  //! mass of T ^ alpha_z^{n-k} ^ beta_t^m on the shell B_n(r1, r2) x D,
  //! alpha_z = dd^c log|z|^2
  double rhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs_stderr = 0.0;
  double residual() const { return lhs - rhs; }
  double combined_stderr() const;
  bool within(double sigmas) const;
};

//! Balance check for closed T of bidegree (k,k), k < n. Constant forms,
//! potentials and nonnegative sums of them.
LelongJensenReport lelong_jensen_check(const Current& current, const ProductSpace& space, double r1, double r2,
                                       const RegionSpec& d, const ProfileOptions& options);

void write_directional_csv(std::ostream& out, const DirectionalProfile& profile);

}  // namespace plurikit
