#pragma once

#include <cstddef>

#include "plurikit/holo.hpp"

namespace plurikit {

struct ContourOptions {
  int initial_points = 64;
  //! Contour samples closer than near_zero_tol * r (Newton distance) to a
  //! zero trigger an outward radius perturbation.
  double near_zero_tol = 1e-8;
  double perturbation = 1e-6;
  int max_perturbations = 8;
  std::size_t max_evaluations = 20'000'000;
};

/// Number of zeros, with multiplicity, of f (one variable) in |w| < r, by
/// the argument principle on the circle |w| = r with adaptive subdivision.
/// A zero on (or within round-off of) the contour moves the radius outward
/// by a factor (1 + perturbation), never the function.
int count_zeros_disc(const HoloFunction& f, double r, const ContourOptions& options = {});

}  // namespace plurikit
