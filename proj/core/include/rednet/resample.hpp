#pragma once

#include <cstddef>

#include "rednet/image.hpp"

namespace rednet {

/// Separable Keys bicubic resampling (a = -0.5) with edge-clamped sampling
/// and pixel-centre alignment. When shrinking, the kernel is stretched by
/// the scale factor so it also acts as the anti-aliasing filter. Weights of
/// every output pixel are normalised to sum to 1.
Image bicubic_resize(const Image& img, std::size_t out_h, std::size_t out_w);

/// Bicubic down-sample by `scale` (output extents rounded up), then back up
/// to the original extents. scale must be 2, 3 or 4.
Image degrade_sr(const Image& img, std::size_t scale);

/// Keys cubic convolution kernel with a = -0.5.
double cubic_kernel(double x);

}  // namespace rednet
