#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rednet/image.hpp"
#include "rednet/rng.hpp"

namespace rednet {

struct TextOverlay {
  Image image;
  /// 1 where a pixel was overwritten, row-major.
  std::vector<std::uint8_t> mask;
  std::size_t overwritten = 0;
};

/// Stamps random strings from a built-in 5x7 bitmap font, scaled to
/// `glyph_height` pixels, at random positions until at least
/// ceil(coverage * pixels) pixels carry `fill`. Throws ValueError if that is
/// not reached within 10^4 glyph placements.
TextOverlay overlay_text(const Image& img, std::size_t glyph_height, double coverage, float fill,
                         RngStream& rng);

}  // namespace rednet
