#pragma once

#include <cstddef>
#include <vector>

#include "plurikit/geometry.hpp"

namespace plurikit {

using MultiIndex = std::vector<int>;

std::size_t binomial(int n, int k);

//! All strictly increasing k-subsets of {0..n-1}, lexicographic.
std::vector<MultiIndex> combinations(int n, int k);

//! Position of a multi-index within combinations(n, k).
std::size_t multi_index_position(const MultiIndex& index, int n);

//! k-th compound matrix: entry (I, J) = det(m[I, J]).
CMatrix compound(const CMatrix& m, int k);

//! Unitary matrix whose first column is v / |v| (Householder completion).
CMatrix unitary_with_first_column(const CVector& v);

}  // namespace plurikit
