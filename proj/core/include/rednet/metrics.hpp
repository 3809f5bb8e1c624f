#pragma once

#include <limits>

#include "rednet/image.hpp"

namespace rednet {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct MetricReport {
  double psnr = 0.0;  // dB; kInfinitePsnr for identical images
  double ssim = 0.0;
};

/// 10 log10(peak^2 / MSE). Identical images give kInfinitePsnr.
double psnr(const Image& a, const Image& b, double peak = 255.0);

/// Mean SSIM over all positions where an 11x11 Gaussian window
/// (sigma 1.5) fits, with C1 = (0.01 L)^2, C2 = (0.03 L)^2 and L = 255.
double ssim(const Image& a, const Image& b);

MetricReport measure(const Image& restored, const Image& clean);

}  // namespace rednet
