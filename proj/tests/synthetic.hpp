#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rednet/image.hpp"
#include "rednet/rng.hpp"

namespace rednet::testing {

// Smooth linear gradient plus a few flat rectangles and discs.
inline Image synthetic_image(std::size_t h, std::size_t w, RngStream& rng) {
  Image img(h, w);
  const double base = 40.0 + 80.0 * rng.uniform();
  const double gy = (rng.uniform() - 0.5) * 120.0 / double(h);
  const double gx = (rng.uniform() - 0.5) * 120.0 / double(w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) img.at(y, x) = float(base + gy * double(y) + gx * double(x));

  const std::size_t shapes = 3 + rng.uniform_index(4);
  for (std::size_t s = 0; s < shapes; ++s) {
    const double level = 20.0 + 215.0 * rng.uniform();
    const double cy = rng.uniform() * double(h), cx = rng.uniform() * double(w);
    const double r = 6.0 + rng.uniform() * double(std::min(h, w)) / 5.0;
    const bool disc = rng.uniform() < 0.5;
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const double dy = double(y) - cy, dx = double(x) - cx;
        const bool inside = disc ? dy * dy + dx * dx <= r * r
                                 : std::abs(dy) <= r && std::abs(dx) <= 0.7 * r;
        if (inside) img.at(y, x) = float(level);
      }
  }
  for (auto& p : img.px) p = std::clamp(std::round(p), 0.0f, 255.0f);
  return img;
}

inline std::vector<Image> synthetic_set(std::size_t count, std::size_t h, std::size_t w,
                                        std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<Image> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(synthetic_image(h, w, rng));
  return out;
}

}  // namespace rednet::testing
