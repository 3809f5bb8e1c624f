#pragma once

#include <cstddef>
#include <cstdint>

#include "rednet/network.hpp"

namespace rednet {

struct GradCheckOptions {
  std::size_t height = 8;
  std::size_t width = 8;
  double step = 1e-3;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  double max_param_error = 0.0;
  double max_input_error = 0.0;
  /// Coordinates whose +-step probe changed a ReLU pattern and were
  /// re-probed with a smaller step.
  std::size_t reprobed = 0;
};

/// |a - b| / max(|a|, |b|); 0 when both are below 1e-12.
double relative_error(double analytic, double numeric);

/// Compares backward() against central differences of the end-to-end MSE
/// loss for every parameter and every input element, in 64-bit. Weights and
/// biases are randomised from the seed so no layer starts dead or linear.
GradCheckResult check_network_gradients(const NetworkConfig& cfg, const GradCheckOptions& opts);

}  // namespace rednet
