#include "plurikit/forms.hpp"

#include <algorithm>

#include "plurikit/errors.hpp"

namespace plurikit {

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return result;
}

std::vector<MultiIndex> combinations(int n, int k) {
  std::vector<MultiIndex> out;
  if (k < 0 || k > n) return out;
  MultiIndex current(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i;
  for (;;) {
    out.push_back(current);
    int i = k - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::size_t multi_index_position(const MultiIndex& index, int n) {
  // combinatorial number system, lexicographic order
  const int k = static_cast<int>(index.size());
  std::size_t pos = 0;
  int previous = -1;
  for (int i = 0; i < k; ++i) {
    const int value = index[static_cast<std::size_t>(i)];
    for (int v = previous + 1; v < value; ++v) pos += binomial(n - v - 1, k - i - 1);
    previous = value;
  }
  return pos;
}

CMatrix compound(const CMatrix& m, int k) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const auto row_sets = combinations(rows, k);
  const auto col_sets = combinations(cols, k);
  CMatrix out(static_cast<Eigen::Index>(row_sets.size()), static_cast<Eigen::Index>(col_sets.size()));
  if (k == 0) {
    out.setOnes();
    return out;
  }
  CMatrix minor(k, k);
  for (std::size_t a = 0; a < row_sets.size(); ++a) {
    for (std::size_t b = 0; b < col_sets.size(); ++b) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          minor(i, j) = m(row_sets[a][static_cast<std::size_t>(i)], col_sets[b][static_cast<std::size_t>(j)]);
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = minor.determinant();
    }
  }
  return out;
}

CMatrix unitary_with_first_column(const CVector& v) {
  const double norm = v.norm();
  require(norm > 0.0, "unitary completion of the zero vector");
  const auto n = v.size();
  CVector u = v / norm;
  // Householder-style reflection H = I - 2 w w^* sending e_1 to phase * u,
  // then fix the phase on the first column.
  const Complex u0 = u(0);
  const double a0 = std::abs(u0);
  const Complex phase = a0 > 0.0 ? u0 / a0 : Complex(1.0, 0.0);
  CVector w = -u;
  w(0) += phase;  // w = phase*e_1 - u
  const double wn = w.norm();
  CMatrix h = CMatrix::Identity(n, n);
  if (wn > 1e-300) {
    w /= wn;
    h -= 2.0 * w * w.adjoint();
  }
  // h * e_1 = phase-rotated u up to sign; normalize first column exactly.
  CMatrix out = h * phase;
  // out.col(0) is +/- u; enforce out.col(0) = u while staying unitary.
  const Complex c = out.col(0).dot(u);
  out.col(0) *= c / std::abs(c);
  return out;
}

}  // namespace plurikit
