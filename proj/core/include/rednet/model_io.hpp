#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rednet/network.hpp"

namespace rednet {

// Model file layout (all integers and floats little-endian):
//
//   "REDN"                 magic
//   u16                    format version (kModelFormatVersion)
//   u32 depth, u32 filters, u32 kernel, u32 channels
//   u8  skip kind, u32 skip step
//   u32 count, u32 x count  downsample layer indices
//   u64 init_seed
//   per layer: out_c*in_c*kh*kw f32 weights, out_c f32 biases
//   u32                    CRC-32 of every preceding byte

inline constexpr std::uint16_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_network(const Network<float>& net);
Network<float> deserialize_network(std::span<const std::uint8_t> bytes);

void save_network(const Network<float>& net, const std::filesystem::path& path);
Network<float> load_network(const std::filesystem::path& path);

}  // namespace rednet
