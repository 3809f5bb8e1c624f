#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rednet/error.hpp"

namespace rednet::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename N>
N parse_number(const std::string& v) {
  N out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ValueError("bad number '" + v + "'");
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  const std::filesystem::path p(v);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig rc;
  auto& n = rc.network;
  auto& t = rc.train;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"depth", [&](const std::string& v) { n.depth = parse_number<std::size_t>(v); }},
      {"filters", [&](const std::string& v) { n.filters = parse_number<std::size_t>(v); }},
      {"kernel", [&](const std::string& v) { n.kernel = parse_number<std::size_t>(v); }},
      {"channels", [&](const std::string& v) { n.channels = parse_number<std::size_t>(v); }},
      {"skip", [&](const std::string& v) { n.skip = SkipMode::parse(v); }},
      {"downsample",
       [&](const std::string& v) {
         n.downsample_layers.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           if (!trim(item).empty()) n.downsample_layers.push_back(parse_number<std::size_t>(trim(item)));
         }
       }},
      {"init_seed", [&](const std::string& v) { n.init_seed = parse_number<std::uint64_t>(v); }},
      {"batch", [&](const std::string& v) { t.batch = parse_number<std::size_t>(v); }},
      {"iterations", [&](const std::string& v) { t.iterations = parse_number<std::size_t>(v); }},
      {"lr", [&](const std::string& v) { t.adam.alpha = parse_number<double>(v); }},
      {"beta1", [&](const std::string& v) { t.adam.beta1 = parse_number<double>(v); }},
      {"beta2", [&](const std::string& v) { t.adam.beta2 = parse_number<double>(v); }},
      {"epsilon", [&](const std::string& v) { t.adam.epsilon = parse_number<double>(v); }},
      {"corruption",
       [&](const std::string& v) {
         t.corruption = parse_corruption(v);
         if (auto* pd = std::get_if<PairDir>(&t.corruption)) pd->path = resolve(base_dir, pd->path.string());
       }},
      {"patch_size", [&](const std::string& v) { t.patch_size = parse_number<std::size_t>(v); }},
      {"patch_stride", [&](const std::string& v) { t.patch_stride = parse_number<std::size_t>(v); }},
      {"val_fraction", [&](const std::string& v) { t.val_fraction = parse_number<double>(v); }},
      {"log_interval", [&](const std::string& v) { t.log_interval = parse_number<std::size_t>(v); }},
      {"max_val_patches",
       [&](const std::string& v) { t.max_val_patches = parse_number<std::size_t>(v); }},
      {"seed", [&](const std::string& v) { t.seed = parse_number<std::uint64_t>(v); }},
      {"data", [&](const std::string& v) { rc.data = resolve(base_dir, v); }},
      {"out", [&](const std::string& v) { rc.out = resolve(base_dir, v); }},
      {"log", [&](const std::string& v) { rc.log = resolve(base_dir, v); }},
  };

  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ValueError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ValueError(where + "unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const Error& e) {
      throw ValueError(where + key + ": " + e.what());
    }
  }
  rc.network.validate();
  rc.train.validate();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

}  // namespace rednet::cli
