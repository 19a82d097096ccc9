#pragma once

#include <optional>
#include <vector>

#include "plurikit/directional.hpp"
#include "plurikit/orders.hpp"
#include "plurikit/report.hpp"

namespace plurikit {

struct FrameOptions {
  std::size_t count = 200;
  //! Replaces Fubini-Study sampling when non-empty.
  std::vector<Frame> forced;
};

struct CroftonOptions {
  //! Report residuals only, without a verdict (psh, non-closed instances).
  bool exploratory = false;
};

/// nu_T(r) against the Fubini-Study average of the slice profiles.
ExperimentReport crofton_check(const Current& current, int q, const RadialGrid& grid, const FrameOptions& frames,
                               const ProfileOptions& options, const CroftonOptions& crofton = {});

/// Frames L with |det(F0^* F)| >= cos(theta).
struct CapSpec {
  Frame center = Frame::standard(1, 2);
  double theta = 1.5707963267948966;

  bool contains(const Frame& frame) const;
  bool is_everything() const;
};

inline const std::vector<double> kDilationFactors = {1.0, 0.5, 0.25};

ExperimentReport theorem1_check(const Current& current, const CapSpec& cap, const RadialGrid& grid,
                                const FrameOptions& frames, const ProfileOptions& options);

ExperimentReport slice_order_survey(const Current& current, int q, const RadialGrid& grid,
                                    const FrameOptions& frames, const ProfileOptions& options);

ExperimentReport ratio_degeneracy_check(const Current& current, const std::vector<double>& r_sequence,
                                        const std::vector<double>& alpha_set, const FrameOptions& frames,
                                        const ProfileOptions& options);

ExperimentReport directional_order_check(const Current& current, const ProductSpace& space, const RegionSpec& d,
                                         const RegionSpec& d_prime, const RadialGrid& grid,
                                         const ProfileOptions& options);

//! Frames used by every frame-based experiment for (q, n, frames, seed).
std::vector<Frame> experiment_frames(int q, int n, const FrameOptions& frames, std::uint64_t seed);

}  // namespace plurikit
