#include "rednet/text.hpp"

#include <array>
#include <cmath>

#include "rednet/error.hpp"

namespace rednet {

namespace {

using Glyph = std::array<std::uint8_t, 7>;  // rows, bit 4 = leftmost column

// Digits then A-Z.
constexpr std::array<Glyph, 36> kFont = {{
    {0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110},
    {0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110},
    {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111},
    {0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110},
    {0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010},
    {0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110},
    {0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110},
    {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000},
    {0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110},
    {0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100},
    {0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001},
    {0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110},
    {0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110},
    {0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100},
    {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111},
    {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000},
    {0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111},
    {0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001},
    {0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110},
    {0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100},
    {0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001},
    {0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111},
    {0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001},
    {0b10001, 0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001},
    {0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110},
    {0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000},
    {0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101},
    {0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001},
    {0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110},
    {0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100},
    {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110},
    {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100},
    {0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010},
    {0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001},
    {0b10001, 0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100},
    {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111},
}};

constexpr std::size_t kMaxPlacements = 10000;

}  // namespace

TextOverlay overlay_text(const Image& img, std::size_t glyph_height, double coverage, float fill,
                         RngStream& rng) {
  if (glyph_height < 5) throw ValueError("text glyph height must be >= 5");
  if (!(coverage > 0.0 && coverage < 1.0)) throw ValueError("text coverage must lie in (0, 1)");
  if (img.size() == 0) throw ValueError("cannot draw text on an empty image");

  TextOverlay out{img, std::vector<std::uint8_t>(img.size(), 0), 0};
  const auto target = std::size_t(std::ceil(coverage * double(img.size())));
  const std::size_t gh = glyph_height;
  const std::size_t gw = std::max<std::size_t>(1, std::size_t(std::lround(5.0 * double(gh) / 7.0)));
  const std::size_t gap = std::max<std::size_t>(1, gh / 7);

  std::size_t placements = 0;
  while (placements < kMaxPlacements) {
    // One string: random length, origin anywhere; glyphs clip at the border.
    const std::size_t len = 3 + rng.uniform_index(8);
    const std::size_t y0 = rng.uniform_index(img.h);
    std::size_t x0 = rng.uniform_index(img.w);
    for (std::size_t ch = 0; ch < len && placements < kMaxPlacements; ++ch) {
      const Glyph& g = kFont[rng.uniform_index(kFont.size())];
      ++placements;
      for (std::size_t r = 0; r < gh && y0 + r < img.h; ++r) {
        const std::uint8_t bits = g[r * 7 / gh];
        for (std::size_t c = 0; c < gw && x0 + c < img.w; ++c) {
          if (!((bits >> (4 - c * 5 / gw)) & 1u)) continue;
          const std::size_t idx = (y0 + r) * img.w + x0 + c;
          if (!out.mask[idx]) {
            out.mask[idx] = 1;
            ++out.overwritten;
          }
          out.image.px[idx] = fill;
        }
      }
      if (out.overwritten >= target) return out;
      x0 += gw + gap;
      if (x0 >= img.w) break;
    }
  }
  throw ValueError("text coverage " + std::to_string(coverage) + " not reached within " +
                   std::to_string(kMaxPlacements) + " glyph placements");
}

}  // namespace rednet
