#include "plurikit/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "plurikit/errors.hpp"
#include "plurikit/rng.hpp"

namespace plurikit {
namespace {

void check_dim(int n) {
  require(n >= 1 && n <= kMaxDim,
          "dimension must be in [1, " + std::to_string(kMaxDim) + "], got " + std::to_string(n));
}

void check_radius(double r) {
  require(std::isfinite(r) && r > 0.0, "radius must be finite and positive");
}

}  // namespace

Frame Frame::from_columns(CMatrix columns, double tol) {
  const auto n = columns.rows();
  const auto q = columns.cols();
  require(q >= 1 && q <= n, "frame needs 1 <= q <= n");
  check_dim(static_cast<int>(n));
  require(columns.allFinite(), "frame entries must be finite");
  const CMatrix gram = columns.adjoint() * columns;
  const double defect = (gram - CMatrix::Identity(q, q)).cwiseAbs().maxCoeff();
  require(defect <= tol, "frame columns are not orthonormal (Gram defect " +
                             std::to_string(defect) + ")");
  return Frame(std::move(columns));
}

Frame Frame::standard(int q, int n) {
  require(q >= 1 && q <= n, "frame needs 1 <= q <= n");
  return Frame(CMatrix::Identity(n, q));
}

CVector Frame::embed(const CVector& w) const {
  require(w.size() == columns_.cols(), "frame_embed: dimension mismatch");
  return columns_ * w;
}

Frame Frame::compose(const Frame& inner) const {
  require(inner.ambient_dim() == sub_dim(), "frame compose: dimension mismatch");
  return Frame(columns_ * inner.columns_);
}

CVector frame_embed(const Frame& frame, const CVector& w) { return frame.embed(w); }

CMatrix orthonormalize(const CMatrix& columns) {
  CMatrix q = columns;
  const auto cols = q.cols();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double original = q.col(j).norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const Complex proj = q.col(i).dot(q.col(j));  // conj(q_i) . q_j
        q.col(j) -= proj * q.col(i);
      }
    }
    const double norm = q.col(j).norm();
    if (!(norm > 1e-10 * std::max(original, 1e-300)))
      throw NumericFailure("orthonormalize: columns are numerically rank deficient");
    q.col(j) /= norm;
  }
  return q;
}

void unit_sphere_point(std::uint64_t seed, std::uint64_t index, std::span<Complex> out) {
  Stream stream(seed, index);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& c : out) {
      c = stream.complex_normal();
      norm2 += std::norm(c);
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : out) c *= inv;
}

void unit_ball_point(std::uint64_t seed, std::uint64_t index, std::span<Complex> out) {
  // direction from the sphere stream, radius by inverse CDF rho = U^{1/(2n)}
  unit_sphere_point(seed, index, out);
  Stream stream(derive_seed(seed, 0xBA11), index);
  const double rho = std::pow(stream.uniform(), 1.0 / (2.0 * static_cast<double>(out.size())));
  for (auto& c : out) c *= rho;
}

SampleBatch sample_sphere(int n, double r, std::size_t count, std::uint64_t seed) {
  check_dim(n);
  check_radius(r);
  require(count >= 1, "sample count must be positive");
  SampleBatch batch{CMatrix(n, static_cast<Eigen::Index>(count)), seed,
                    {SampleDomain::sphere, n, 0, r}};
  for (std::size_t i = 0; i < count; ++i) {
    auto col = batch.points.col(static_cast<Eigen::Index>(i));
    unit_sphere_point(seed, i, std::span<Complex>(col.data(), static_cast<std::size_t>(n)));
    col *= r;
  }
  return batch;
}

SampleBatch sample_ball(int n, double r, std::size_t count, std::uint64_t seed) {
  check_dim(n);
  check_radius(r);
  require(count >= 1, "sample count must be positive");
  SampleBatch batch{CMatrix(n, static_cast<Eigen::Index>(count)), seed,
                    {SampleDomain::ball, n, 0, r}};
  for (std::size_t i = 0; i < count; ++i) {
    auto col = batch.points.col(static_cast<Eigen::Index>(i));
    unit_ball_point(seed, i, std::span<Complex>(col.data(), static_cast<std::size_t>(n)));
    col *= r;
  }
  return batch;
}

Frame random_frame(int q, int n, std::uint64_t seed, std::uint64_t index) {
  check_dim(n);
  require(q >= 1 && q <= n, "grassmannian needs 1 <= q <= n");
  // Rank deficiency has probability zero; resample on the next sub-stream.
  for (std::uint64_t attempt = 0;; ++attempt) {
    Stream stream(derive_seed(seed, attempt), index);
    CMatrix gauss(n, q);
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < n; ++i) gauss(i, j) = stream.complex_normal();
    try {
      return Frame::from_columns(orthonormalize(gauss));
    } catch (const NumericFailure&) {
      if (attempt > 16) throw;
    }
  }
}

std::vector<Frame> sample_grassmannian(int q, int n, std::size_t count, std::uint64_t seed) {
  require(count >= 1, "sample count must be positive");
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) frames.push_back(random_frame(q, n, seed, i));
  return frames;
}

double ball_volume(int n, double r) {
  return std::pow(std::numbers::pi, n) * std::pow(r, 2 * n) / std::tgamma(n + 1.0);
}

}  // namespace plurikit
