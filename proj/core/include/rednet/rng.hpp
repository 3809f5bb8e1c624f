#pragma once

#include <cstdint>
#include <random>

#include "rednet/tensor.hpp"

namespace rednet {

/// Seeded random stream.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the C++
/// standard, and converts draws to floating point by hand (the standard
/// distributions are implementation-defined). The same seed therefore yields
/// the same sequence on every conforming platform.
///
/// Gaussian draws use the Box-Muller transform; the second value of each
/// pair is cached and returned by the next call.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Standard normal draw.
  double normal();

  /// Independent stream keyed by (seed, tag). Does not advance this stream.
  RngStream derive(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Replaces every element with an independent N(mean, stddev^2) draw.
template <typename T>
Tensor<T>& gaussian_fill(Tensor<T>& t, double mean, double stddev, RngStream& rng);

}  // namespace rednet
