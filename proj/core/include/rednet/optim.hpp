#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rednet {

struct AdamHyper {
  double alpha = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// First and second moment estimates per parameter tensor plus step count.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;

  /// Zero moments matching the given parameter layout.
  template <typename T>
  static AdamState for_params(std::span<const std::span<T>> params) {
    AdamState s;
    for (const auto& p : params) {
      s.m.emplace_back(p.size(), 0.0);
      s.v.emplace_back(p.size(), 0.0);
    }
    return s;
  }
};

/// One Adam update with the bias correction folded into the step size:
///
///   m <- b1 m + (1 - b1) g,   v <- b2 v + (1 - b2) g^2
///   a_t = a sqrt(1 - b2^t) / (1 - b1^t)
///   theta <- theta - a_t m / (sqrt(v) + eps)
///
/// t is incremented before a_t is formed. An empty state is sized on first
/// use. Throws ShapeError on layout mismatch and ValueError on non-finite
/// gradients (parameters are left untouched in that case).
template <typename T>
void adam_step(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads,
               AdamState& state, const AdamHyper& hyper);

/// theta <- theta - lr g
template <typename T>
void sgd_step(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads,
              double lr);

}  // namespace rednet
