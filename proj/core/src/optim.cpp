#include "rednet/optim.hpp"

#include <cmath>
#include <string>

#include "rednet/error.hpp"

namespace rednet {

namespace {

template <typename T>
void check_layout(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("optimizer: " + std::to_string(params.size()) + " parameter tensors but " +
                     std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size()) {
      throw ShapeError("optimizer: parameter tensor " + std::to_string(i) + " has " +
                       std::to_string(params[i].size()) + " elements, gradient " +
                       std::to_string(grads[i].size()));
    }
    for (T g : grads[i]) {
      if (!std::isfinite(double(g))) {
        throw ValueError("optimizer: non-finite gradient in parameter tensor " + std::to_string(i));
      }
    }
  }
}

}  // namespace

void AdamHyper::validate() const {
  if (!(alpha > 0.0)) throw ValueError("Adam alpha must be > 0");
  if (!(epsilon > 0.0)) throw ValueError("Adam epsilon must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ValueError("Adam beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ValueError("Adam beta2 must lie in [0, 1)");
}

template <typename T>
void adam_step(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads,
               AdamState& state, const AdamHyper& hyper) {
  hyper.validate();
  check_layout(params, grads);
  if (state.m.empty() && state.v.empty() && state.t == 0) {
    state = AdamState::for_params(params);
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("optimizer: Adam state does not match the parameter layout");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].size() != params[i].size() || state.v[i].size() != params[i].size()) {
      throw ShapeError("optimizer: Adam moments of tensor " + std::to_string(i) +
                       " have the wrong size");
    }
  }

  state.t += 1;
  const double t = double(state.t);
  const double b1 = hyper.beta1, b2 = hyper.beta2;
  const double alpha_t = hyper.alpha * std::sqrt(1.0 - std::pow(b2, t)) / (1.0 - std::pow(b1, t));

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto g = grads[i];
    auto p = params[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double gk = double(g[k]);
      m[k] = b1 * m[k] + (1.0 - b1) * gk;
      v[k] = b2 * v[k] + (1.0 - b2) * gk * gk;
      p[k] = T(double(p[k]) - alpha_t * m[k] / (std::sqrt(v[k]) + hyper.epsilon));
    }
  }
}

template <typename T>
void sgd_step(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads,
              double lr) {
  check_layout(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = T(double(p[k]) - lr * double(grads[i][k]));
  }
}

template void adam_step(std::span<const std::span<float>>, std::span<const std::span<const float>>,
                        AdamState&, const AdamHyper&);
template void adam_step(std::span<const std::span<double>>,
                        std::span<const std::span<const double>>, AdamState&, const AdamHyper&);
template void sgd_step(std::span<const std::span<float>>, std::span<const std::span<const float>>,
                       double);
template void sgd_step(std::span<const std::span<double>>, std::span<const std::span<const double>>,
                       double);

}  // namespace rednet
