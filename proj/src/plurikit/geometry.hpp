#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace plurikit {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

//! Largest ambient dimension supported by the stack-buffer evaluators.
inline constexpr int kMaxDim = 16;

inline constexpr double kOrthonormalTol = 1e-12;

/// Orthonormal basis of a q-dimensional complex subspace of C^n, stored as
/// the columns of an n x q matrix. A point of the Grassmannian G(q, n).
class Frame {
 public:
  //! Validates orthonormality of the columns (Gram = identity within tol).
  static Frame from_columns(CMatrix columns, double tol = kOrthonormalTol);
  //! First q standard basis vectors of C^n.
  static Frame standard(int q, int n);

  int ambient_dim() const { return static_cast<int>(columns_.rows()); }
  int sub_dim() const { return static_cast<int>(columns_.cols()); }
  const CMatrix& matrix() const { return columns_; }
  CVector column(int j) const { return columns_.col(j); }

  //! z = sum_j w_j * column_j.
  CVector embed(const CVector& w) const;
  //! The frame of the subspace spanned by this->embed(inner columns).
  Frame compose(const Frame& inner) const;

 private:
  explicit Frame(CMatrix columns) : columns_(std::move(columns)) {}
  CMatrix columns_;
};

CVector frame_embed(const Frame& frame, const CVector& w);

//! Modified Gram-Schmidt with one re-orthogonalization pass. Throws
//! NumericFailure if the columns are numerically rank deficient.
CMatrix orthonormalize(const CMatrix& columns);

enum class SampleDomain { sphere, ball, grassmannian };

struct SampleDescriptor {
  SampleDomain domain = SampleDomain::sphere;
  int n = 1;
  int q = 0;  // grassmannian only
  double radius = 1.0;
  bool operator==(const SampleDescriptor&) const = default;
};

struct SampleBatch {
  CMatrix points;  // n x count, one point per column
  std::uint64_t seed = 0;
  SampleDescriptor descriptor;

  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
  CVector point(std::size_t i) const { return points.col(static_cast<Eigen::Index>(i)); }
};

//! Writes the i-th point of the (seed) unit-sphere stream of S^{2n-1} into out.
void unit_sphere_point(std::uint64_t seed, std::uint64_t index, std::span<Complex> out);
//! Writes the i-th point of the (seed) unit-ball stream of B_n(1) into out.
void unit_ball_point(std::uint64_t seed, std::uint64_t index, std::span<Complex> out);

SampleBatch sample_sphere(int n, double r, std::size_t count, std::uint64_t seed);
SampleBatch sample_ball(int n, double r, std::size_t count, std::uint64_t seed);

//! Draws frames from the unitarily invariant probability measure on G(q, n).
Frame random_frame(int q, int n, std::uint64_t seed, std::uint64_t index);
std::vector<Frame> sample_grassmannian(int q, int n, std::size_t count, std::uint64_t seed);

//! Volume of the Euclidean ball of radius r in C^n (= R^{2n}).
double ball_volume(int n, double r);

}  // namespace plurikit
