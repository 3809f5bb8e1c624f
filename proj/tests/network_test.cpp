#include <gtest/gtest.h>

#include <cmath>

#include "rednet/engine.hpp"
#include "rednet/gradcheck.hpp"
#include "rednet/network.hpp"
#include "rednet/rng.hpp"

using namespace rednet;

namespace {

NetworkConfig small(std::size_t depth, SkipMode skip, std::size_t filters = 4) {
  NetworkConfig cfg;
  cfg.depth = depth;
  cfg.filters = filters;
  cfg.skip = skip;
  return cfg;
}

Tensor<float> nonneg_input(Shape s, std::uint64_t seed) {
  Tensor<float> x(s);
  RngStream rng(seed);
  for (auto& v : x.data()) v = float(255.0 * rng.uniform());
  return x;
}

std::vector<std::size_t> taps(const std::vector<Junction>& js) {
  std::vector<std::size_t> out;
  for (const auto& j : js) out.push_back(j.tap);
  return out;
}

}  // namespace

TEST(SkipMode, ParseAndPrint) {
  EXPECT_EQ(SkipMode::parse("none"), SkipMode::none());
  EXPECT_EQ(SkipMode::parse("mirror:2"), SkipMode::mirror(2));
  EXPECT_EQ(SkipMode::parse("sequential:3"), SkipMode::sequential(3));
  EXPECT_EQ(SkipMode::parse(SkipMode::mirror(4).str()), SkipMode::mirror(4));
  EXPECT_THROW(SkipMode::parse("mirror"), ValueError);
  EXPECT_THROW(SkipMode::parse("mirror:x"), ValueError);
  EXPECT_THROW(SkipMode::parse("ladder:2"), ValueError);
}

TEST(NetworkConfig, RejectsInvalid) {
  EXPECT_THROW(small(5, SkipMode::none()).validate(), ValueError);
  EXPECT_THROW(small(0, SkipMode::none()).validate(), ValueError);
  EXPECT_THROW(small(4, SkipMode::mirror(0)).validate(), ValueError);
  EXPECT_THROW(small(4, SkipMode::mirror(3)).validate(), ValueError);
  auto cfg = small(4, SkipMode::mirror(1));
  cfg.downsample_layers = {3};
  EXPECT_THROW(cfg.validate(), ValueError);
  cfg.downsample_layers = {1, 1};
  EXPECT_THROW(cfg.validate(), ValueError);
  cfg.downsample_layers = {};
  cfg.kernel = 4;
  EXPECT_THROW(cfg.validate(), ValueError);
}

TEST(Wiring, Red20MirrorTwo) {
  const auto js = wire_junctions(small(20, SkipMode::mirror(2)));
  EXPECT_EQ(taps(js), (std::vector<std::size_t>{0, 2, 4, 6, 8}));
  for (const auto& j : js) EXPECT_EQ(j.target, 20 - j.tap);
}

TEST(Wiring, Red10WithoutShortcuts) {
  EXPECT_TRUE(wire_junctions(small(10, SkipMode::none())).empty());
}

TEST(Wiring, SmallestInstance) {
  const auto js = wire_junctions(small(2, SkipMode::mirror(1)));
  ASSERT_EQ(js.size(), 1u);
  EXPECT_EQ(js[0], (Junction{0, 2}));
}

TEST(Wiring, SequentialBlocks) {
  const auto js = wire_junctions(small(4, SkipMode::sequential(2)));
  ASSERT_EQ(js.size(), 1u);
  EXPECT_EQ(js[0], (Junction{1, 3}));
  EXPECT_EQ(wire_junctions(small(10, SkipMode::sequential(2))).size(), 4u);
}

TEST(Wiring, RejectsJunctionAcrossResolutionChange) {
  auto cfg = small(6, SkipMode::sequential(2));
  cfg.downsample_layers = {2};
  EXPECT_THROW(wire_junctions(cfg), ShapeError);
}

TEST(Wiring, DownsampleMirrorJunctionsMatch) {
  auto cfg = small(8, SkipMode::mirror(1));
  cfg.downsample_layers = {2};
  const auto net = build_network<float>(cfg);
  EXPECT_EQ(net.size_multiple(), 2u);
  EXPECT_EQ(net.layer(1).params.stride, 2u);
  EXPECT_EQ(net.layer(8 - 2).params.stride, 2u);
}

TEST(Build, LayerChannels) {
  auto cfg = small(6, SkipMode::mirror(1), 5);
  cfg.channels = 3;
  const auto net = build_network<float>(cfg);
  ASSERT_EQ(net.depth(), 6u);
  EXPECT_EQ(net.layer(0).params.in_c(), 3u);
  EXPECT_EQ(net.layer(0).params.out_c(), 5u);
  for (std::size_t l = 1; l + 1 < 6; ++l) {
    EXPECT_EQ(net.layer(l).params.in_c(), 5u);
    EXPECT_EQ(net.layer(l).params.out_c(), 5u);
  }
  EXPECT_EQ(net.layer(5).params.out_c(), 3u);
  for (std::size_t l = 0; l < 6; ++l)
    EXPECT_EQ(net.layer(l).kind, l < 3 ? LayerKind::conv : LayerKind::deconv);
}

TEST(Build, HeInitialisationStatistics) {
  auto cfg = small(4, SkipMode::mirror(1), 32);
  cfg.init_seed = 3;
  const auto net = build_network<double>(cfg);
  const auto& p = net.layer(1).params;
  double sq = 0.0;
  for (double v : p.weights.data()) sq += v * v;
  const double sd = std::sqrt(sq / double(p.weights.size()));
  EXPECT_NEAR(sd, std::sqrt(2.0 / (32 * 9)), 0.05 * std::sqrt(2.0 / (32 * 9)));
  for (double b : p.bias) EXPECT_EQ(b, 0.0);
  EXPECT_EQ(build_network<double>(cfg), net);
}

TEST(Forward, IdentityAtZero) {
  auto net = build_network<float>(small(20, SkipMode::mirror(2), 8));
  net.zero_parameters();
  const auto x = nonneg_input(Shape{2, 1, 12, 10}, 1);
  EXPECT_EQ(forward(net, x, false).output, x);
}

TEST(Forward, NoSkipZeroWeightsGiveZero) {
  auto net = build_network<float>(small(6, SkipMode::none()));
  net.zero_parameters();
  const auto y = forward(net, nonneg_input(Shape{1, 1, 6, 6}, 2), false).output;
  for (float v : y.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Forward, SmallestInstanceFormula) {
  auto net = build_network<double>(small(2, SkipMode::mirror(1), 3));
  RngStream rng(4);
  for (std::size_t l = 0; l < 2; ++l) {
    gaussian_fill(net.mutable_layer(l).params.weights, 0.0, 0.5, rng);
    for (auto& b : net.mutable_layer(l).params.bias) b = rng.normal();
  }
  Tensor<double> x(Shape{1, 1, 5, 5});
  for (auto& v : x.data()) v = rng.uniform();
  const auto h = relu_forward(conv2d_forward(x, net.layer(0).params));
  const auto expect = sum_relu_forward(x, deconv2d_forward(h, net.layer(1).params));
  EXPECT_EQ(forward(net, x, false).output, expect);
}

TEST(Forward, PixelwiseShapes) {
  const auto net = build_network<float>(small(20, SkipMode::mirror(2), 4));
  EXPECT_EQ(forward(net, nonneg_input(Shape{1, 1, 50, 50}, 3), false).output.shape(),
            (Shape{1, 1, 50, 50}));
  auto cfg = small(10, SkipMode::mirror(2), 4);
  cfg.downsample_layers = {1, 3};
  const auto down = build_network<float>(cfg);
  EXPECT_EQ(down.size_multiple(), 4u);
  EXPECT_EQ(forward(down, nonneg_input(Shape{1, 1, 24, 36}, 4), false).output.shape(),
            (Shape{1, 1, 24, 36}));
  EXPECT_THROW(forward(down, nonneg_input(Shape{1, 1, 26, 36}, 4), false), ShapeError);
}

TEST(Forward, RejectsWrongChannels) {
  const auto net = build_network<float>(small(4, SkipMode::mirror(1)));
  EXPECT_THROW(forward(net, Tensor<float>(Shape{1, 2, 8, 8}), false), ShapeError);
}

TEST(Backward, ZeroUpstream) {
  const auto net = build_network<double>(small(4, SkipMode::mirror(1)));
  Tensor<double> x(Shape{1, 1, 6, 6}, 1.0);
  const auto fr = forward(net, x, true);
  const auto g = backward(net, *fr.cache, Tensor<double>(x.shape()));
  for (const auto& v : g.views())
    for (double d : v) EXPECT_EQ(d, 0.0);
  for (double d : g.d_input.data()) EXPECT_EQ(d, 0.0);
}

TEST(Backward, StaleCacheRejected) {
  auto net = build_network<float>(small(4, SkipMode::mirror(1)));
  const auto x = nonneg_input(Shape{1, 1, 6, 6}, 5);
  const auto fr = forward(net, x, true);
  net.mutable_layer(0).params.bias[0] = 1.0f;
  EXPECT_THROW(backward(net, *fr.cache, fr.output), Error);
}

TEST(Backward, ZeroPointHasZeroLossAndGradient) {
  auto net = build_network<float>(small(10, SkipMode::mirror(2)));
  net.zero_parameters();
  const auto x = nonneg_input(Shape{4, 1, 8, 8}, 6);
  const auto fr = forward(net, x, true);
  const auto lg = mse_loss_grad(fr.output, x);
  EXPECT_EQ(lg.loss, 0.0);
  const auto g = backward(net, *fr.cache, lg.grad);
  for (const auto& v : g.views())
    for (float d : v) EXPECT_EQ(d, 0.0f);
}

TEST(Backward, ChainOnlyWithoutSkips) {
  auto net = build_network<double>(small(4, SkipMode::none(), 3));
  RngStream rng(7);
  for (std::size_t l = 0; l < 4; ++l)
    for (auto& b : net.mutable_layer(l).params.bias) b = 0.1 + 0.05 * rng.normal();
  Tensor<double> x(Shape{1, 1, 6, 6});
  for (auto& v : x.data()) v = rng.uniform();
  Tensor<double> dy(x.shape());
  gaussian_fill(dy, 0.0, 1.0, rng);

  // Manual chain: X_l = relu(layer_l(X_{l-1})).
  std::vector<Tensor<double>> xs{x}, pre;
  for (std::size_t l = 0; l < 4; ++l) {
    const auto& L = net.layer(l);
    pre.push_back(L.kind == LayerKind::conv ? conv2d_forward(xs.back(), L.params)
                                            : deconv2d_forward(xs.back(), L.params));
    xs.push_back(relu_forward(pre.back()));
  }
  Tensor<double> g = dy;
  LayerGrads<double> bottom;
  for (std::size_t l = 4; l-- > 0;) {
    const auto& L = net.layer(l);
    const auto dpre = relu_backward(pre[l], g);
    auto lg = L.kind == LayerKind::conv ? conv2d_backward(xs[l], L.params, dpre)
                                        : deconv2d_backward(xs[l], L.params, dpre);
    g = lg.d_input;
    if (l == 0) bottom = lg;
  }
  const auto fr = forward(net, x, true);
  EXPECT_EQ(fr.output, xs.back());
  const auto ng = backward(net, *fr.cache, dy);
  for (std::size_t i = 0; i < bottom.d_weights.size(); ++i)
    EXPECT_NEAR(ng.layers[0].d_weights[i], bottom.d_weights[i], 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(ng.d_input[i], g[i], 1e-12);
}

class GradientFamilies : public ::testing::TestWithParam<std::tuple<std::string, bool>> {};

TEST_P(GradientFamilies, MatchesFiniteDifferences) {
  const auto& [skip, down] = GetParam();
  auto cfg = small(down ? 6 : 4, SkipMode::parse(skip));
  if (down) cfg.downsample_layers = {1};
  GradCheckOptions opts;
  opts.seed = 17;
  const auto r = check_network_gradients(cfg, opts);
  EXPECT_GT(r.checked, 0u);
  EXPECT_LT(r.max_rel_error, 1e-4) << "params " << r.max_param_error << " input "
                                   << r.max_input_error;
}

INSTANTIATE_TEST_SUITE_P(
    Configs, GradientFamilies,
    ::testing::Combine(::testing::Values("none", "mirror:1", "mirror:2", "sequential:2"),
                       ::testing::Bool()),
    [](const auto& info) {
      std::string name = std::get<0>(info.param);
      for (auto& ch : name)
        if (ch == ':') ch = '_';
      return name + (std::get<1>(info.param) ? "_down" : "_flat");
    });

TEST(Network, CastRoundTrip) {
  const auto net = build_network<float>(small(4, SkipMode::mirror(1)));
  EXPECT_EQ(net.cast<double>().cast<float>(), net);
  EXPECT_EQ(net.parameter_count(), 2 * (4 * 9 + 4) + 2 * (16 * 9 + 4) - 3);
}
