#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rednet/optim.hpp"
#include "rednet/rng.hpp"

using namespace rednet;

namespace {

// Textbook form with explicit bias-corrected moments.
struct ReferenceAdam {
  double m = 0, v = 0;
  int t = 0;
  double step(double theta, double g, const AdamHyper& h) {
    ++t;
    m = h.beta1 * m + (1 - h.beta1) * g;
    v = h.beta2 * v + (1 - h.beta2) * g * g;
    const double mhat = m / (1 - std::pow(h.beta1, t));
    const double vhat = v / (1 - std::pow(h.beta2, t));
    return theta - h.alpha * mhat / (std::sqrt(vhat) + h.epsilon / std::sqrt(1 - std::pow(h.beta2, t)));
  }
};

template <typename T>
void adam(std::vector<T>& p, const std::vector<T>& g, AdamState& s, const AdamHyper& h = {}) {
  const std::span<T> ps[] = {std::span<T>(p)};
  const std::span<const T> gs[] = {std::span<const T>(g)};
  adam_step<T>(ps, gs, s, h);
}

}  // namespace

TEST(Adam, ZeroGradientIsNoOp) {
  std::vector<double> p{1.0, -2.0, 3.0}, g(3, 0.0);
  AdamState s;
  for (int i = 0; i < 5; ++i) adam(p, g, s);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.0}));
  EXPECT_EQ(s.t, 5u);
}

TEST(Adam, ClosedFormFirstStep) {
  std::vector<double> p(4, 0.0), g(4, 2.0);
  AdamState s;
  adam(p, g, s);
  // m = 0.2, v = 0.004, a_1 = 1e-4 * sqrt(0.001) / 0.1
  const double a1 = 1e-4 * std::sqrt(1 - 0.999) / (1 - 0.9);
  EXPECT_NEAR(a1, 3.16228e-5, 1e-10);
  const double expected = -a1 * 0.2 / (std::sqrt(0.004) + 1e-8);
  for (double v : p) {
    EXPECT_NEAR(v, expected, 1e-18);
    EXPECT_NEAR(v, -9.99997e-5, 1e-9);
  }
  EXPECT_NEAR(s.m[0][0], 0.2, 1e-15);
  EXPECT_NEAR(s.v[0][0], 0.004, 1e-15);
}

TEST(Adam, FirstStepMagnitudeIndependentOfScale) {
  for (double g : {1e-3, 0.5, 7.0, 1e4}) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> p{0.0}, gr{sign * g};
      AdamState s;
      adam(p, gr, s);
      EXPECT_LE(std::abs(p[0]), 1e-4 * (1 + 1e-6));
      EXPECT_NEAR(p[0], -sign * 1e-4, 1e-4 * 1e-3);
    }
  }
}

TEST(Adam, MatchesTextbookForm) {
  RngStream rng(3);
  AdamHyper h;
  h.alpha = 1e-2;
  std::vector<double> p{0.5}, g{0.0};
  ReferenceAdam ref;
  double theta = 0.5;
  AdamState s;
  for (int i = 0; i < 50; ++i) {
    g[0] = rng.normal();
    adam(p, g, s, h);
    theta = ref.step(theta, g[0], h);
    EXPECT_NEAR(p[0], theta, 1e-12);
  }
}

TEST(Adam, FloatParametersWithDoubleMoments) {
  std::vector<float> p(3, 1.0f), g{1.0f, -1.0f, 0.0f};
  AdamState s = AdamState::for_params<float>(std::vector<std::span<float>>{p});
  adam(p, g, s);
  EXPECT_FLOAT_EQ(p[0], float(1.0 - 1e-4 * (1.0 / (1.0 + 1e-8 / std::sqrt(0.001)))));
  EXPECT_GT(p[1], 1.0f);
  EXPECT_EQ(p[2], 1.0f);
}

TEST(Adam, Deterministic) {
  std::vector<double> a{0.1, 0.2}, b{0.1, 0.2}, g{0.3, -0.7};
  AdamState sa, sb;
  for (int i = 0; i < 10; ++i) {
    adam(a, g, sa);
    adam(b, g, sb);
  }
  EXPECT_EQ(a, b);
}

TEST(Adam, RejectsNonFiniteAndMismatch) {
  std::vector<double> p{1.0, 2.0}, g{1.0, std::numeric_limits<double>::quiet_NaN()};
  AdamState s;
  EXPECT_THROW(adam(p, g, s), ValueError);
  EXPECT_EQ(p, (std::vector<double>{1.0, 2.0}));
  std::vector<double> short_g{1.0};
  EXPECT_THROW(adam(p, short_g, s), ShapeError);
  AdamHyper bad;
  bad.beta1 = 1.0;
  EXPECT_THROW(bad.validate(), ValueError);
}

TEST(Sgd, Arithmetic) {
  std::vector<double> p{1.0}, g{10.0};
  const std::span<double> ps[] = {std::span<double>(p)};
  const std::span<const double> gs[] = {std::span<const double>(g)};
  sgd_step<double>(ps, gs, 1e-6);
  EXPECT_DOUBLE_EQ(p[0], 0.99999);
}

TEST(Sgd, TwoStepsEqualSummedGradient) {
  std::vector<double> a{0.25}, b{0.25}, g1{0.5}, g2{1.5}, gsum{2.0};
  auto step = [](std::vector<double>& p, std::vector<double>& g) {
    const std::span<double> ps[] = {std::span<double>(p)};
    const std::span<const double> gs[] = {std::span<const double>(g)};
    sgd_step<double>(ps, gs, 0.125);
  };
  step(a, g1);
  step(a, g2);
  step(b, gsum);
  EXPECT_DOUBLE_EQ(a[0], b[0]);
  std::vector<double> zero{0.0};
  step(b, zero);
  EXPECT_DOUBLE_EQ(a[0], b[0]);
}
