#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rednet/blur.hpp"
#include "rednet/image.hpp"
#include "rednet/rng.hpp"

namespace rednet {

struct GaussianNoise {
  double sigma = 0.0;
};
struct SuperResolution {
  std::size_t scale = 2;
};
struct Blur {
  BlurKernelSpec kernel;
};
struct Text {
  std::size_t glyph_height = 10;
  double coverage = 0.1;
  float fill = 255.0f;
};
/// Externally supplied corrupted/clean pairs (e.g. JPEG deblocking).
struct PairDir {
  std::filesystem::path path;
};
struct Blind;

/// Degradation H(x) + n applied to clean training or test images.
using CorruptionSpec = std::variant<GaussianNoise, SuperResolution, Blur, Text, PairDir, Blind>;

/// Uniform choice among several specs, made independently per call.
struct Blind {
  std::vector<CorruptionSpec> choices;
};

/// Parses the command-line form: `gaussian:30`, `sr:3`, `blur:disk:5`,
/// `blur:gaussian:<sigma>[:<size>]`, `blur:motion:<length>:<angle>`,
/// `text:<height>:<coverage>[:<fill>]`, `pairdir:<path>`,
/// `blind:<spec>,<spec>,...`.
CorruptionSpec parse_corruption(const std::string& text);
std::string to_string(const CorruptionSpec& spec);

/// Throws ValueError when a parameter is out of range.
void validate(const CorruptionSpec& spec);

/// True when the corruption draws from the rng (fresh output per call).
bool is_stochastic(const CorruptionSpec& spec);

/// y = x + n with n ~ N(0, sigma^2) per pixel, unclipped.
Image add_gaussian_noise(const Image& img, double sigma, RngStream& rng);

/// Applies `spec` to `img`. PairDir is rejected: pairs are loaded, not synthesised.
Image corrupt(const Image& img, const CorruptionSpec& spec, RngStream& rng);

}  // namespace rednet
