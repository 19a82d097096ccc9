#pragma once

#include <complex>
#include <cstdint>

namespace plurikit {

//! SplitMix64 finalizer; the mixing step of every stream.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

//! Derives an independent seed for a sub-task; (seed, tag) -> seed'.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(mix64(seed) ^ mix64(tag * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL));
}

/// Counter-based random stream keyed by (seed, task index).
///
/// The i-th draw is a pure function of (seed, index, i), so results never
/// depend on which worker produced them or in what order.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index) : key_(derive_seed(seed, index)) {}

  std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

  //! Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  //! Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal();

  //! Standard complex Gaussian, E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace plurikit
