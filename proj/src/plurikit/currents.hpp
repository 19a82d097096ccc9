#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "plurikit/geometry.hpp"
#include "plurikit/holo.hpp"
#include "plurikit/psh.hpp"

namespace plurikit {

/// Constant-coefficient (k,k) form
///   T = (i/2pi)^k s_k sum_{|I|=|J|=k} H_{IJ} dz_I ^ dzbar_J,
/// s_k = (-1)^{k(k-1)/2}, multi-indices in lexicographic order. With this
/// convention H = identity is beta^k / k!, where beta = dd^c|z|^2.
struct ConstForm {
  int n = 1;
  int k = 1;
  CMatrix coefficients;  // binom(n,k) x binom(n,k), Hermitian

  //! beta on C^n (k = 1, H = I).
  static ConstForm kahler(int n);
  //! (1,1) form from an n x n Hermitian matrix.
  static ConstForm hermitian(const CMatrix& h);
  //! dd^c of |z_begin|^2 + ... + |z_{end-1}|^2 on C^n.
  static ConstForm block_kahler(int n, int begin, int end);
  //! General (k,k) form; validates shape and Hermitian symmetry.
  static ConstForm general(int n, int k, CMatrix coefficients);

  //! Sum of H_II over multi-indices I inside [begin, end).
  double block_trace(int begin, int end) const;
  //! c with T ^ beta^{n-k} = c * beta^n, so nu_T(r) = c r^{2k}.
  double lelong_coefficient() const;
};

class Current;

struct WeightedCurrent {
  double weight = 0.0;
  std::shared_ptr<const Current> current;
};

struct ZeroSet {
  HoloFunction f;
};

struct Potential {
  PshFunction u;
};

struct NonnegSum {
  std::vector<WeightedCurrent> terms;
};

/// A positive closed current on C^n, from one of the concrete families.
class Current {
 public:
  using Variant = std::variant<ZeroSet, Potential, ConstForm, NonnegSum>;

  static Current zero_set(HoloFunction f);
  static Current potential(PshFunction u);
  static Current const_form(ConstForm form);
  static Current nonneg_sum(const std::vector<std::pair<double, Current>>& terms);

  int ambient_dim() const { return n_; }
  //! k for a (k,k) current.
  int bidegree() const { return k_; }
  //! p = n - k.
  int bidimension() const { return n_ - k_; }
  const Variant& variant() const { return data_; }
  std::string kind() const;

 private:
  Current(Variant data, int n, int k) : data_(std::move(data)), n_(n), k_(k) {}
  Variant data_;
  int n_;
  int k_;
};

//! T|L for the subspace spanned by frame (requires p + q >= n). Throws
//! DegenerateSlice when the subspace lies in the singular support.
Current restrict_current(const Current& current, const Frame& frame);

//! Pullback along w -> offset + map * w (map n x q). Used for slicing by
//! affine fibres in product spaces. Same degeneracy rule as restriction.
Current restrict_affine(const Current& current, const CMatrix& map, const CVector& offset);

struct PositivityReport {
  bool positive = true;
  double min_value = 0.0;
  std::string witness;
};

PositivityReport positivity_check(const Current& current, std::size_t sample_count, std::uint64_t seed);

}  // namespace plurikit
