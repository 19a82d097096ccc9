#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "plurikit/geometry.hpp"

namespace support {

// Kolmogorov-Smirnov distance of a sample against Uniform(0, 1).
inline double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - x[i]));
    d = std::max(d, std::abs(x[i] - static_cast<double>(i) / n));
  }
  return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                             static_cast<double>(j) / static_cast<double>(b.size())));
  }
  return d;
}

// Critical value c(alpha) sqrt((n + m) / (n m)); c(0.01) = 1.628.
inline double ks_critical_001(std::size_t n, std::size_t m = 0) {
  const double nn = static_cast<double>(n);
  if (m == 0) return 1.628 / std::sqrt(nn);
  const double mm = static_cast<double>(m);
  return 1.628 * std::sqrt((nn + mm) / (nn * mm));
}

// Roots of c0 + c1 w + ... + cd w^d via the companion matrix.
inline std::vector<plurikit::Complex> companion_roots(const std::vector<plurikit::Complex>& c) {
  const int d = static_cast<int>(c.size()) - 1;
  plurikit::CMatrix m = plurikit::CMatrix::Zero(d, d);
  for (int i = 1; i < d; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) m(i, d - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<plurikit::CMatrix> solver(m);
  const auto& ev = solver.eigenvalues();
  return std::vector<plurikit::Complex>(ev.data(), ev.data() + ev.size());
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double std_error(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace support
