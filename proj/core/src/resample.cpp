#include "rednet/resample.hpp"

#include <algorithm>
#include <cmath>

#include "rednet/error.hpp"

namespace rednet {

double cubic_kernel(double x) {
  constexpr double a = -0.5;
  const double t = std::abs(x);
  if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

namespace {

// Sparse interpolation weights from `in` samples onto `out` samples.
struct AxisWeights {
  std::vector<std::size_t> first;  // per output, index into taps
  std::vector<std::size_t> count;
  std::vector<std::size_t> src;
  std::vector<double> weight;
};

AxisWeights axis_weights(std::size_t in, std::size_t out) {
  const double scale = double(out) / double(in);
  const double stretch = scale < 1.0 ? scale : 1.0;  // widens the kernel when shrinking
  const double radius = 2.0 / stretch;
  AxisWeights aw;
  for (std::size_t d = 0; d < out; ++d) {
    const double centre = (double(d) + 0.5) / scale - 0.5;
    const auto lo = std::ptrdiff_t(std::floor(centre - radius));
    const auto hi = std::ptrdiff_t(std::ceil(centre + radius));
    aw.first.push_back(aw.src.size());
    double total = 0.0;
    const std::size_t begin = aw.weight.size();
    for (std::ptrdiff_t s = lo; s <= hi; ++s) {
      const double wt = cubic_kernel((centre - double(s)) * stretch);
      if (wt == 0.0) continue;
      aw.src.push_back(std::size_t(std::clamp<std::ptrdiff_t>(s, 0, std::ptrdiff_t(in) - 1)));
      aw.weight.push_back(wt);
      total += wt;
    }
    for (std::size_t k = begin; k < aw.weight.size(); ++k) aw.weight[k] /= total;
    aw.count.push_back(aw.weight.size() - begin);
  }
  return aw;
}

}  // namespace

Image bicubic_resize(const Image& img, std::size_t out_h, std::size_t out_w) {
  if (out_h < 1 || out_w < 1) throw ValueError("bicubic_resize: output extents must be >= 1");
  if (img.h == 0 || img.w == 0) throw ValueError("bicubic_resize: empty input image");
  const AxisWeights wx = axis_weights(img.w, out_w);
  const AxisWeights wy = axis_weights(img.h, out_h);

  std::vector<double> rows(img.h * out_w);
  for (std::size_t y = 0; y < img.h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = wx.first[x]; k < wx.first[x] + wx.count[x]; ++k) {
        acc += wx.weight[k] * double(img.at(y, wx.src[k]));
      }
      rows[y * out_w + x] = acc;
    }
  }
  Image out(out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = wy.first[y]; k < wy.first[y] + wy.count[y]; ++k) {
        acc += wy.weight[k] * rows[wy.src[k] * out_w + x];
      }
      out.at(y, x) = float(acc);
    }
  }
  return out;
}

Image degrade_sr(const Image& img, std::size_t scale) {
  if (scale < 2 || scale > 4) throw ValueError("super-resolution scale must be 2, 3 or 4");
  if (img.h < scale || img.w < scale) {
    throw ValueError("image " + std::to_string(img.h) + "x" + std::to_string(img.w) +
                     " is smaller than scale " + std::to_string(scale));
  }
  const std::size_t lo_h = (img.h + scale - 1) / scale;
  const std::size_t lo_w = (img.w + scale - 1) / scale;
  return bicubic_resize(bicubic_resize(img, lo_h, lo_w), img.h, img.w);
}

}  // namespace rednet
