#include "rednet/metrics.hpp"

#include <array>
#include <cmath>

#include "rednet/error.hpp"

namespace rednet {

namespace {

constexpr std::size_t kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kDynamicRange = 255.0;
constexpr double kC1 = (0.01 * kDynamicRange) * (0.01 * kDynamicRange);
constexpr double kC2 = (0.03 * kDynamicRange) * (0.03 * kDynamicRange);

void check_pair(const char* op, const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": image sizes " + std::to_string(a.h) + "x" +
                     std::to_string(a.w) + " and " + std::to_string(b.h) + "x" +
                     std::to_string(b.w) + " differ");
  }
  if (a.size() == 0) throw ShapeError(std::string(op) + ": empty images");
}

std::array<double, kWindow> window_1d() {
  std::array<double, kWindow> g{};
  double total = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double d = double(i) - double(kWindow / 2);
    g[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    total += g[i];
  }
  for (auto& v : g) v /= total;
  return g;
}

// Separable Gaussian filter keeping only positions where the window fits.
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t h, std::size_t w,
                                 const std::array<double, kWindow>& g) {
  const std::size_t oh = h - kWindow + 1, ow = w - kWindow + 1;
  std::vector<double> tmp(h * ow);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += g[k] * src[y * w + x + k];
      tmp[y * ow + x] = acc;
    }
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += g[k] * tmp[(y + k) * ow + x];
      out[y * ow + x] = acc;
    }
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  check_pair("psnr", a, b);
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = double(a.px[i]) - double(b.px[i]);
    sse += d * d;
  }
  if (sse == 0.0) return kInfinitePsnr;
  const double mse = sse / double(a.size());
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& a, const Image& b) {
  check_pair("ssim", a, b);
  if (a.h < kWindow || a.w < kWindow) {
    throw ShapeError("ssim: images must be at least 11x11, got " + std::to_string(a.h) + "x" +
                     std::to_string(a.w));
  }
  const auto g = window_1d();
  const std::size_t n = a.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a.px[i];
    y[i] = b.px[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, a.h, a.w, g);
  const auto my = filter_valid(y, a.h, a.w, g);
  const auto sxx = filter_valid(xx, a.h, a.w, g);
  const auto syy = filter_valid(yy, a.h, a.w, g);
  const auto sxy = filter_valid(xy, a.h, a.w, g);

  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    const double num = (2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2);
    const double den = (mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2);
    total += num / den;
  }
  return total / double(mx.size());
}

MetricReport measure(const Image& restored, const Image& clean) {
  return {psnr(restored, clean), ssim(restored, clean)};
}

}  // namespace rednet
