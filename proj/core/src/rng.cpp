#include "rednet/rng.hpp"

#include <cmath>
#include <numbers>

namespace rednet {

namespace {

// splitmix64 finaliser; mixes (seed, tag) into an unrelated seed.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double RngStream::uniform() {
  return double(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw ValueError("uniform_index: bound must be positive");
  // Rejection keeps every residue equally likely.
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double RngStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

RngStream RngStream::derive(std::uint64_t tag) const {
  return RngStream(mix64(seed_ ^ mix64(tag + 0x51ed270b27a4f1c3ULL)));
}

template <typename T>
Tensor<T>& gaussian_fill(Tensor<T>& t, double mean, double stddev, RngStream& rng) {
  if (!(stddev >= 0.0)) throw ValueError("gaussian_fill: standard deviation must be >= 0");
  for (auto& x : t.data()) x = T(mean + stddev * rng.normal());
  return t;
}

template Tensor<float>& gaussian_fill(Tensor<float>&, double, double, RngStream&);
template Tensor<double>& gaussian_fill(Tensor<double>&, double, double, RngStream&);

}  // namespace rednet
