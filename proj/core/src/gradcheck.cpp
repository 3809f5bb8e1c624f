#include "rednet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "rednet/engine.hpp"
#include "rednet/rng.hpp"

namespace rednet {

double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < 1e-12) return 0.0;
  return std::abs(analytic - numeric) / scale;
}

namespace {

using Pattern = std::vector<bool>;

struct Probe {
  double loss;
  Pattern pattern;
};

Probe probe(const Network<double>& net, const Tensor<double>& x, const Tensor<double>& target) {
  auto fr = forward(net, x, true);
  Probe p{mse_loss_grad(fr.output, target).loss, {}};
  for (std::size_t l = 1; l < fr.cache->activations.size(); ++l) {
    for (double v : fr.cache->activations[l].data()) p.pattern.push_back(v > 0.0);
  }
  return p;
}

// Central difference of the loss in one coordinate. The step shrinks while
// the probes straddle a ReLU kink, since the loss is only piecewise smooth.
template <typename Set>
double central_difference(const Network<double>& net, const Tensor<double>& x,
                          const Tensor<double>& target, const Pattern& base, double step, Set set,
                          bool& reprobed) {
  reprobed = false;
  double h = step;
  while (true) {
    set(+h);
    const Probe plus = probe(net, x, target);
    set(-h);
    const Probe minus = probe(net, x, target);
    set(0.0);
    const bool smooth = plus.pattern == base && minus.pattern == base;
    if (smooth || h < 1e-7) return (plus.loss - minus.loss) / (2.0 * h);
    reprobed = true;
    h /= 10.0;
  }
}

}  // namespace

GradCheckResult check_network_gradients(const NetworkConfig& cfg, const GradCheckOptions& opts) {
  Network<double> net = build_network<double>(cfg);
  RngStream rng(opts.seed);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    auto& p = net.mutable_layer(l).params;
    const double fan_in = double(p.in_c() * p.kh() * p.kw());
    gaussian_fill(p.weights, 0.0, std::sqrt(2.0 / fan_in), rng);
    for (auto& b : p.bias) b = 0.05 + 0.1 * rng.normal();
  }

  Tensor<double> x(Shape{1, cfg.channels, opts.height, opts.width});
  Tensor<double> target(x.shape());
  for (auto& v : x.data()) v = rng.uniform();
  for (auto& v : target.data()) v = rng.uniform();

  auto fr = forward(net, x, true);
  const auto lg = mse_loss_grad(fr.output, target);
  const NetworkGrads<double> grads = backward(net, *fr.cache, lg.grad);
  const Pattern base = probe(net, x, target).pattern;

  GradCheckResult result;
  bool reprobed = false;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const std::size_t nw = net.layer(l).params.weights.size();
    for (std::size_t k = 0; k < nw + net.layer(l).params.bias.size(); ++k) {
      const bool is_weight = k < nw;
      const double analytic = is_weight ? grads.layers[l].d_weights[k]
                                        : grads.layers[l].d_bias[k - nw];
      double& slot = is_weight ? net.mutable_layer(l).params.weights[k]
                               : net.mutable_layer(l).params.bias[k - nw];
      const double original = slot;
      const double numeric = central_difference(
          net, x, target, base, opts.step, [&](double delta) { slot = original + delta; },
          reprobed);
      const double err = relative_error(analytic, numeric);
      result.max_param_error = std::max(result.max_param_error, err);
      result.reprobed += reprobed;
      ++result.checked;
    }
  }

  for (std::size_t k = 0; k < x.size(); ++k) {
    const double original = x[k];
    const double numeric = central_difference(
        net, x, target, base, opts.step, [&](double delta) { x[k] = original + delta; }, reprobed);
    const double err = relative_error(grads.d_input[k], numeric);
    result.max_input_error = std::max(result.max_input_error, err);
    result.reprobed += reprobed;
    ++result.checked;
  }
  result.max_rel_error = std::max(result.max_param_error, result.max_input_error);
  return result;
}

}  // namespace rednet
