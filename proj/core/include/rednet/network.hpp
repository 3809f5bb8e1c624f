#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rednet/layers.hpp"
#include "rednet/tensor.hpp"

namespace rednet {

enum class SkipKind : std::uint8_t { none = 0, mirror = 1, sequential = 2 };

/// How encoder feature maps are routed forward.
///
///  - none: plain conv/deconv chain.
///  - mirror(step): X_i is added to the pre-activation of decoder layer
///    depth - i for taps i = 0, step, 2*step, ... with i <= depth/2 - step.
///    Tap 0 connects the network input to its output.
///  - sequential(block): residual blocks; X_j is added to the pre-activation
///    of layer j + block for j = 1, 1 + block, ... while j + block < depth.
struct SkipMode {
  SkipKind kind = SkipKind::mirror;
  std::size_t step = 2;

  static SkipMode none() { return {SkipKind::none, 1}; }
  static SkipMode mirror(std::size_t step) { return {SkipKind::mirror, step}; }
  static SkipMode sequential(std::size_t block) { return {SkipKind::sequential, block}; }

  /// Accepts "none", "mirror:<step>", "sequential:<block>".
  static SkipMode parse(const std::string& text);
  std::string str() const;

  friend bool operator==(const SkipMode&, const SkipMode&) = default;
};

struct NetworkConfig {
  std::size_t depth = 20;    // total layers, depth/2 conv then depth/2 deconv
  std::size_t filters = 64;
  std::size_t kernel = 3;
  std::size_t channels = 1;
  SkipMode skip = SkipMode::mirror(2);
  /// 1-based encoder layer indices that use stride 2. The mirrored decoder
  /// layer depth - i + 1 up-samples by 2. Strided layers use a kernel of
  /// size kernel + 1 with padding (kernel - 1) / 2, which halves even
  /// extents exactly.
  std::vector<std::size_t> downsample_layers;
  std::uint64_t init_seed = 0;

  std::size_t half() const { return depth / 2; }
  bool is_downsampled(std::size_t encoder_layer) const;

  /// Throws ValueError when an invariant is violated.
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

enum class LayerKind : std::uint8_t { conv, deconv };

template <typename T>
struct Layer {
  LayerKind kind = LayerKind::conv;
  ConvParams<T> params;
  bool relu = true;

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Activation X_tap is summed into the pre-activation of layer `target`
/// (1-based; layer l maps X_{l-1} to X_l).
struct Junction {
  std::size_t tap = 0;
  std::size_t target = 0;

  friend bool operator==(const Junction&, const Junction&) = default;
};

/// Activations X_0 (input) through X_depth (output) of a training-mode pass.
template <typename T>
struct ForwardCache {
  std::vector<Tensor<T>> activations;
  std::uint64_t revision = 0;
};

template <typename T>
struct NetworkGrads {
  /// Per layer; d_input is the gradient reaching that layer's input through
  /// the layer itself (junction contributions are not included).
  std::vector<LayerGrads<T>> layers;
  /// Total gradient with respect to the network input X_0.
  Tensor<T> d_input;

  /// Weight and bias gradients in Network::parameters() order.
  std::vector<std::span<const T>> views() const;
};

template <typename T>
class Network {
 public:
  Network() = default;
  Network(NetworkConfig cfg, std::vector<Layer<T>> layers);

  const NetworkConfig& config() const { return cfg_; }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<Layer<T>>& layers() const { return layers_; }
  const Layer<T>& layer(std::size_t index) const { return layers_.at(index); }
  const std::vector<Junction>& junctions() const { return junctions_; }

  /// Mutable access invalidates outstanding forward caches.
  Layer<T>& mutable_layer(std::size_t index);
  /// Weights then bias for every layer, in layer order.
  std::vector<std::span<T>> parameters();
  std::vector<std::span<const T>> parameters() const;
  std::size_t parameter_count() const;
  void zero_parameters();

  /// Spatial extents of a valid input must be multiples of this.
  std::size_t size_multiple() const;

  /// Bumped on every mutable access; caches remember the value they saw.
  std::uint64_t revision() const { return revision_; }

  template <typename U>
  Network<U> cast() const {
    std::vector<Layer<U>> out;
    out.reserve(layers_.size());
    for (const auto& l : layers_) {
      Layer<U> c;
      c.kind = l.kind;
      c.relu = l.relu;
      c.params.weights = l.params.weights.template cast<U>();
      c.params.bias.assign(l.params.bias.begin(), l.params.bias.end());
      c.params.stride = l.params.stride;
      c.params.padding = l.params.padding;
      out.push_back(std::move(c));
    }
    return Network<U>(cfg_, std::move(out));
  }

  friend bool operator==(const Network& a, const Network& b) {
    return a.cfg_ == b.cfg_ && a.layers_ == b.layers_;
  }

 private:
  NetworkConfig cfg_;
  std::vector<Layer<T>> layers_;
  std::vector<Junction> junctions_;
  std::uint64_t revision_ = 0;
};

/// Junction table implied by a configuration. Throws ShapeError naming the
/// first pair whose operands differ in channels or resolution.
std::vector<Junction> wire_junctions(const NetworkConfig& cfg);

/// Builds the layer stack with He initialisation (Gaussian, std
/// sqrt(2 / fan_in), zero bias) drawn from cfg.init_seed.
template <typename T>
Network<T> build_network(const NetworkConfig& cfg);

template <typename T>
struct ForwardResult {
  Tensor<T> output;
  std::optional<ForwardCache<T>> cache;
};

template <typename T>
ForwardResult<T> forward(const Network<T>& net, const Tensor<T>& x, bool keep_cache);

/// Gradients accumulate along the layer chain and along every junction.
template <typename T>
NetworkGrads<T> backward(const Network<T>& net, const ForwardCache<T>& cache, const Tensor<T>& dy);

}  // namespace rednet
