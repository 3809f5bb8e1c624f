#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "rednet/image.hpp"

namespace rednet {

struct DiskBlur {
  double radius = 1.0;
};
struct GaussianBlur {
  double sigma = 1.0;
  std::size_t size = 0;  // 0 selects 2 * ceil(3 sigma) + 1
};
struct MotionBlur {
  std::size_t length = 1;
  double angle_deg = 0.0;
};

using BlurKernelSpec = std::variant<DiskBlur, GaussianBlur, MotionBlur>;

/// Odd-sized, non-negative kernel that sums to 1.
struct BlurKernel {
  std::size_t size = 1;
  std::vector<double> taps;  // size * size, row-major

  double at(std::size_t y, std::size_t x) const { return taps[y * size + x]; }
};

BlurKernel build_blur_kernel(const BlurKernelSpec& spec);

/// Same-size correlation; samples outside the image are clamped to the edge.
Image blur_image(const Image& img, const BlurKernel& kernel);

}  // namespace rednet
