#pragma once

#include <filesystem>
#include <string>

#include "rednet/engine.hpp"
#include "rednet/network.hpp"

namespace rednet::cli {

/// Settings read from a `key = value` file; `#` starts a comment.
struct RunConfig {
  NetworkConfig network;
  TrainConfig train;
  std::filesystem::path data;  // directory of clean .pgm images
  std::filesystem::path out;   // model file
  std::filesystem::path log;   // CSV training log
};

/// Unknown keys and malformed values raise ValueError naming the line. Paths
/// are resolved against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace rednet::cli
