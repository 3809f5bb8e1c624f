#include "rednet/blur.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "rednet/error.hpp"

namespace rednet {

namespace {

void normalise(BlurKernel& k) {
  double total = 0.0;
  for (double t : k.taps) total += t;
  for (double& t : k.taps) t /= total;
}

BlurKernel disk(const DiskBlur& d) {
  if (!(d.radius >= 1.0)) throw ValueError("disk blur radius must be >= 1");
  const auto r = std::ptrdiff_t(std::ceil(d.radius));
  BlurKernel k{std::size_t(2 * r + 1), {}};
  k.taps.assign(k.size * k.size, 0.0);
  for (std::ptrdiff_t y = -r; y <= r; ++y)
    for (std::ptrdiff_t x = -r; x <= r; ++x)
      if (double(x * x + y * y) <= d.radius * d.radius) {
        k.taps[std::size_t(y + r) * k.size + std::size_t(x + r)] = 1.0;
      }
  normalise(k);
  return k;
}

BlurKernel gaussian(const GaussianBlur& g) {
  if (!(g.sigma > 0.0)) throw ValueError("gaussian blur sigma must be > 0");
  const std::size_t size =
      g.size == 0 ? 2 * std::size_t(std::ceil(3.0 * g.sigma)) + 1 : g.size;
  if (size % 2 == 0) throw ValueError("gaussian blur size must be odd");
  const auto r = std::ptrdiff_t(size / 2);
  BlurKernel k{size, std::vector<double>(size * size)};
  for (std::ptrdiff_t y = -r; y <= r; ++y)
    for (std::ptrdiff_t x = -r; x <= r; ++x) {
      k.taps[std::size_t(y + r) * size + std::size_t(x + r)] =
          std::exp(-double(x * x + y * y) / (2.0 * g.sigma * g.sigma));
    }
  normalise(k);
  return k;
}

// Bresenham line with exactly `length` cells along its major axis,
// centred on the kernel origin.
BlurKernel motion(const MotionBlur& m) {
  if (m.length < 1) throw ValueError("motion blur length must be >= 1");
  const double theta = m.angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(theta), dy = -std::sin(theta);  // image rows grow downwards
  const bool x_major = std::abs(dx) >= std::abs(dy);
  const auto span = std::ptrdiff_t(m.length) - 1;
  const std::ptrdiff_t start = -(span / 2);
  const double slope = x_major ? dy / dx : dx / dy;

  // End points along (major, minor).
  const std::ptrdiff_t a0 = start, a1 = start + span;
  const auto b0 = std::ptrdiff_t(std::lround(double(a0) * slope));
  const auto b1 = std::ptrdiff_t(std::lround(double(a1) * slope));

  std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> cells;  // (x, y)
  const std::ptrdiff_t da = a1 - a0, db = std::abs(b1 - b0);
  const std::ptrdiff_t sb = b1 >= b0 ? 1 : -1;
  std::ptrdiff_t err = 2 * db - da;
  std::ptrdiff_t b = b0;
  for (std::ptrdiff_t a = a0; a <= a1; ++a) {
    cells.push_back(x_major ? std::pair{a, b} : std::pair{b, a});
    if (err > 0) {
      b += sb;
      err -= 2 * da;
    }
    err += 2 * db;
  }

  std::ptrdiff_t r = 0;
  for (auto [x, y] : cells) r = std::max({r, std::abs(x), std::abs(y)});
  BlurKernel k{std::size_t(2 * r + 1), {}};
  k.taps.assign(k.size * k.size, 0.0);
  for (auto [x, y] : cells) k.taps[std::size_t(y + r) * k.size + std::size_t(x + r)] = 1.0;
  normalise(k);
  return k;
}

}  // namespace

BlurKernel build_blur_kernel(const BlurKernelSpec& spec) {
  return std::visit(
      [](const auto& s) -> BlurKernel {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, DiskBlur>) return disk(s);
        if constexpr (std::is_same_v<S, GaussianBlur>) return gaussian(s);
        if constexpr (std::is_same_v<S, MotionBlur>) return motion(s);
      },
      spec);
}

Image blur_image(const Image& img, const BlurKernel& kernel) {
  if (kernel.size % 2 == 0) throw ValueError("blur kernel extent must be odd");
  if (kernel.taps.size() != kernel.size * kernel.size) throw ValueError("malformed blur kernel");
  const auto r = std::ptrdiff_t(kernel.size / 2);
  const auto H = std::ptrdiff_t(img.h), W = std::ptrdiff_t(img.w);
  Image out(img.h, img.w);
  for (std::ptrdiff_t y = 0; y < H; ++y)
    for (std::ptrdiff_t x = 0; x < W; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t u = -r; u <= r; ++u) {
        const auto sy = std::size_t(std::clamp(y + u, std::ptrdiff_t(0), H - 1));
        for (std::ptrdiff_t v = -r; v <= r; ++v) {
          const auto sx = std::size_t(std::clamp(x + v, std::ptrdiff_t(0), W - 1));
          acc += kernel.at(std::size_t(u + r), std::size_t(v + r)) * double(img.at(sy, sx));
        }
      }
      out.at(std::size_t(y), std::size_t(x)) = float(acc);
    }
  return out;
}

}  // namespace rednet
