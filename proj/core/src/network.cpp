#include "rednet/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rednet/rng.hpp"

namespace rednet {

namespace {

// Geometry of one layer as implied by a configuration.
struct LayerSpec {
  LayerKind kind;
  std::size_t in_c, out_c, kernel, stride, padding;
};

std::vector<LayerSpec> layer_specs(const NetworkConfig& cfg) {
  const std::size_t n = cfg.half();
  const std::size_t pad = (cfg.kernel - 1) / 2;
  std::vector<LayerSpec> specs;
  specs.reserve(cfg.depth);
  for (std::size_t l = 1; l <= cfg.depth; ++l) {
    const bool encoder = l <= n;
    const std::size_t mirror = encoder ? l : cfg.depth - l + 1;
    const bool strided = cfg.is_downsampled(mirror);
    LayerSpec s;
    s.kind = encoder ? LayerKind::conv : LayerKind::deconv;
    s.in_c = l == 1 ? cfg.channels : cfg.filters;
    s.out_c = l == cfg.depth ? cfg.channels : cfg.filters;
    s.kernel = strided ? cfg.kernel + 1 : cfg.kernel;
    s.stride = strided ? 2 : 1;
    s.padding = pad;
    specs.push_back(s);
  }
  return specs;
}

std::string activation_desc(std::size_t channels, std::size_t level) {
  return std::to_string(channels) + " channels at 1/" + std::to_string(std::size_t(1) << level) +
         " resolution";
}

}  // namespace

SkipMode SkipMode::parse(const std::string& text) {
  if (text == "none") return none();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValueError("bad skip mode '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != arg.size() || arg.empty() || value < 1) {
    throw ValueError("bad skip step in '" + text + "'");
  }
  if (kind == "mirror") return mirror(std::size_t(value));
  if (kind == "sequential") return sequential(std::size_t(value));
  throw ValueError("unknown skip mode '" + kind + "'");
}

std::string SkipMode::str() const {
  switch (kind) {
    case SkipKind::none:
      return "none";
    case SkipKind::mirror:
      return "mirror:" + std::to_string(step);
    case SkipKind::sequential:
      return "sequential:" + std::to_string(step);
  }
  return "?";
}

bool NetworkConfig::is_downsampled(std::size_t encoder_layer) const {
  return std::find(downsample_layers.begin(), downsample_layers.end(), encoder_layer) !=
         downsample_layers.end();
}

void NetworkConfig::validate() const {
  if (depth < 2 || depth % 2 != 0) {
    throw ValueError("network depth must be even and >= 2, got " + std::to_string(depth));
  }
  if (filters < 1) throw ValueError("network needs at least one filter");
  if (kernel < 1 || kernel % 2 == 0) {
    throw ValueError("kernel size must be odd, got " + std::to_string(kernel));
  }
  if (channels < 1) throw ValueError("network needs at least one channel");
  if (skip.kind != SkipKind::none && skip.step < 1) throw ValueError("skip step must be >= 1");
  if (skip.kind == SkipKind::mirror && skip.step > half()) {
    throw ValueError("mirror skip step " + std::to_string(skip.step) + " exceeds depth/2 = " +
                     std::to_string(half()));
  }
  std::set<std::size_t> seen;
  for (auto i : downsample_layers) {
    if (i < 1 || i > half()) {
      throw ValueError("downsample layer " + std::to_string(i) + " outside 1.." +
                       std::to_string(half()));
    }
    if (!seen.insert(i).second) {
      throw ValueError("downsample layer " + std::to_string(i) + " listed twice");
    }
  }
}

std::vector<Junction> wire_junctions(const NetworkConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.half();
  const std::size_t L = cfg.depth;

  // Channel count and down-sampling level of every activation X_0..X_L.
  std::vector<std::size_t> channels(L + 1), level(L + 1);
  channels[0] = cfg.channels;
  level[0] = 0;
  const auto specs = layer_specs(cfg);
  for (std::size_t l = 1; l <= L; ++l) {
    const auto& s = specs[l - 1];
    channels[l] = s.out_c;
    level[l] = level[l - 1];
    if (s.stride == 2) level[l] = l <= n ? level[l] + 1 : level[l] - 1;
  }

  std::vector<Junction> junctions;
  switch (cfg.skip.kind) {
    case SkipKind::none:
      break;
    case SkipKind::mirror:
      for (std::size_t i = 0; i + cfg.skip.step <= n; i += cfg.skip.step) {
        junctions.push_back({i, L - i});
      }
      break;
    case SkipKind::sequential:
      for (std::size_t j = 1; j + cfg.skip.step < L; j += cfg.skip.step) {
        junctions.push_back({j, j + cfg.skip.step});
      }
      break;
  }

  for (const auto& j : junctions) {
    if (channels[j.tap] != channels[j.target] || level[j.tap] != level[j.target]) {
      throw ShapeError("junction X_" + std::to_string(j.tap) + " -> layer " +
                       std::to_string(j.target) + " joins " +
                       activation_desc(channels[j.tap], level[j.tap]) + " with " +
                       activation_desc(channels[j.target], level[j.target]));
    }
  }
  return junctions;
}

template <typename T>
Network<T>::Network(NetworkConfig cfg, std::vector<Layer<T>> layers)
    : cfg_(std::move(cfg)), layers_(std::move(layers)) {
  junctions_ = wire_junctions(cfg_);
  const auto specs = layer_specs(cfg_);
  if (layers_.size() != specs.size()) {
    throw ShapeError("network config needs " + std::to_string(specs.size()) + " layers, got " +
                     std::to_string(layers_.size()));
  }
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const auto& s = specs[l];
    const auto& p = layers_[l].params;
    p.validate();
    const Shape want{s.out_c, s.in_c, s.kernel, s.kernel};
    if (layers_[l].kind != s.kind || p.weights.shape() != want || p.stride != s.stride ||
        p.padding != s.padding) {
      throw ShapeError("layer " + std::to_string(l + 1) + " does not match the configuration");
    }
  }
}

template <typename T>
Layer<T>& Network<T>::mutable_layer(std::size_t index) {
  ++revision_;
  return layers_.at(index);
}

template <typename T>
std::vector<std::span<T>> Network<T>::parameters() {
  ++revision_;
  std::vector<std::span<T>> out;
  for (auto& l : layers_) {
    out.push_back(l.params.weights.data());
    out.push_back(l.params.bias);
  }
  return out;
}

template <typename T>
std::vector<std::span<const T>> Network<T>::parameters() const {
  std::vector<std::span<const T>> out;
  for (const auto& l : layers_) {
    out.push_back(l.params.weights.data());
    out.push_back(l.params.bias);
  }
  return out;
}

template <typename T>
std::size_t Network<T>::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers_) total += l.params.weights.size() + l.params.bias.size();
  return total;
}

template <typename T>
void Network<T>::zero_parameters() {
  for (auto p : parameters()) std::fill(p.begin(), p.end(), T(0));
}

template <typename T>
std::size_t Network<T>::size_multiple() const {
  return std::size_t(1) << cfg_.downsample_layers.size();
}

template <typename T>
std::vector<std::span<const T>> NetworkGrads<T>::views() const {
  std::vector<std::span<const T>> out;
  for (const auto& l : layers) {
    out.push_back(l.d_weights.data());
    out.push_back(l.d_bias);
  }
  return out;
}

template <typename T>
Network<T> build_network(const NetworkConfig& cfg) {
  cfg.validate();
  RngStream rng(cfg.init_seed);
  std::vector<Layer<T>> layers;
  for (const auto& s : layer_specs(cfg)) {
    Layer<T> layer;
    layer.kind = s.kind;
    layer.params = ConvParams<T>(s.out_c, s.in_c, s.kernel, s.kernel, s.stride, s.padding);
    const double fan_in = double(s.in_c * s.kernel * s.kernel);
    gaussian_fill(layer.params.weights, 0.0, std::sqrt(2.0 / fan_in), rng);
    layers.push_back(std::move(layer));
  }
  return Network<T>(cfg, std::move(layers));
}

namespace {

template <typename T>
const Junction* junction_into(const Network<T>& net, std::size_t layer) {
  for (const auto& j : net.junctions())
    if (j.target == layer) return &j;
  return nullptr;
}

template <typename T>
bool is_tap(const Network<T>& net, std::size_t index) {
  return std::any_of(net.junctions().begin(), net.junctions().end(),
                     [&](const Junction& j) { return j.tap == index; });
}

template <typename T>
void add_into(Tensor<T>& acc, const Tensor<T>& x) {
  if (acc.shape() != x.shape()) {
    throw ShapeError("gradient accumulation shapes " + acc.shape().str() + " and " +
                     x.shape().str() + " differ");
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

}  // namespace

template <typename T>
ForwardResult<T> forward(const Network<T>& net, const Tensor<T>& x, bool keep_cache) {
  const auto& cfg = net.config();
  if (x.c() != cfg.channels) {
    throw ShapeError("network expects " + std::to_string(cfg.channels) + " input channels, got " +
                     std::to_string(x.c()));
  }
  const std::size_t m = net.size_multiple();
  if (x.h() % m != 0 || x.w() % m != 0) {
    throw ShapeError("input extents " + std::to_string(x.h()) + "x" + std::to_string(x.w()) +
                     " must be multiples of " + std::to_string(m));
  }

  const std::size_t L = net.depth();
  std::vector<Tensor<T>> acts(L + 1);
  acts[0] = x;
  for (std::size_t l = 1; l <= L; ++l) {
    const auto& layer = net.layer(l - 1);
    Tensor<T> z = layer.kind == LayerKind::conv ? conv2d_forward(acts[l - 1], layer.params)
                                                : deconv2d_forward(acts[l - 1], layer.params);
    if (const Junction* j = junction_into(net, l)) {
      const auto& skip = acts[j->tap];
      if (skip.shape() != z.shape()) {
        throw ShapeError("junction X_" + std::to_string(j->tap) + " -> layer " +
                         std::to_string(l) + ": " + skip.shape().str() + " vs " +
                         z.shape().str());
      }
      if (layer.relu) {
        acts[l] = sum_relu_forward(z, skip);
      } else {
        add_into(z, skip);
        acts[l] = std::move(z);
      }
    } else {
      acts[l] = layer.relu ? relu_forward(z) : std::move(z);
    }
    if (!keep_cache && !is_tap(net, l - 1)) acts[l - 1] = Tensor<T>();
  }

  ForwardResult<T> result;
  result.output = acts[L];
  if (keep_cache) result.cache = ForwardCache<T>{std::move(acts), net.revision()};
  return result;
}

template <typename T>
NetworkGrads<T> backward(const Network<T>& net, const ForwardCache<T>& cache, const Tensor<T>& dy) {
  const std::size_t L = net.depth();
  const auto& acts = cache.activations;
  if (acts.size() != L + 1 || cache.revision != net.revision()) {
    throw Error("backward: forward cache is missing or stale for this network");
  }
  if (dy.shape() != acts[L].shape()) {
    throw ShapeError("backward: output gradient " + dy.shape().str() + " does not match output " +
                     acts[L].shape().str());
  }

  std::vector<Tensor<T>> grad(L + 1);
  for (std::size_t i = 0; i < L; ++i) grad[i] = Tensor<T>(acts[i].shape());
  grad[L] = dy;

  NetworkGrads<T> out;
  out.layers.resize(L);
  for (std::size_t l = L; l >= 1; --l) {
    const auto& layer = net.layer(l - 1);
    Tensor<T> dz = layer.relu ? relu_backward(acts[l], grad[l]) : grad[l];
    if (const Junction* j = junction_into(net, l)) add_into(grad[j->tap], dz);
    auto lg = layer.kind == LayerKind::conv ? conv2d_backward(acts[l - 1], layer.params, dz)
                                            : deconv2d_backward(acts[l - 1], layer.params, dz);
    add_into(grad[l - 1], lg.d_input);
    out.layers[l - 1] = std::move(lg);
    grad[l] = Tensor<T>();
  }
  out.d_input = std::move(grad[0]);
  return out;
}

#define REDNET_INSTANTIATE(T)                                                                 \
  template class Network<T>;                                                                  \
  template struct NetworkGrads<T>;                                                            \
  template Network<T> build_network<T>(const NetworkConfig&);                                 \
  template ForwardResult<T> forward(const Network<T>&, const Tensor<T>&, bool);               \
  template NetworkGrads<T> backward(const Network<T>&, const ForwardCache<T>&, const Tensor<T>&);

REDNET_INSTANTIATE(float)
REDNET_INSTANTIATE(double)

#undef REDNET_INSTANTIATE

}  // namespace rednet
