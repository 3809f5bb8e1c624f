#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "rednet/tensor.hpp"

namespace rednet {

/// Grayscale image with real-valued pixels, nominal range [0, 255].
struct Image {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<float> px;

  Image() = default;
  Image(std::size_t h, std::size_t w, float fill = 0.0f) : h(h), w(w), px(h * w, fill) {}

  float& at(std::size_t y, std::size_t x) { return px[y * w + x]; }
  float at(std::size_t y, std::size_t x) const { return px[y * w + x]; }
  std::size_t size() const { return px.size(); }
  bool same_shape(const Image& o) const { return h == o.h && w == o.w; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Single-image, single-channel tensor view of an image (copying).
template <typename T>
Tensor<T> to_tensor(const Image& img);
template <typename T>
Image to_image(const Tensor<T>& t);

/// Stacks equally sized images into one (n, 1, h, w) batch.
template <typename T>
Tensor<T> stack(const std::vector<const Image*>& images);

/// Binary PGM (P5), maxval 255 only.
Image read_pgm(const std::filesystem::path& path);
/// Clamps to [0, 255] and rounds half up.
void write_pgm(const Image& img, const std::filesystem::path& path);

/// Crops of size x size in row-major grid order.
std::vector<Image> extract_patches(const Image& img, std::size_t size, std::size_t stride);

struct ImagePair {
  std::string name;
  Image corrupted;
  Image clean;
};

/// Reads `<name>.clean.pgm` / `<name>.corrupt.pgm` siblings, sorted by name.
std::vector<ImagePair> load_pairdir(const std::filesystem::path& dir);

/// Every *.pgm file in `dir`, sorted by file name.
std::vector<Image> load_pgm_dir(const std::filesystem::path& dir);

}  // namespace rednet
