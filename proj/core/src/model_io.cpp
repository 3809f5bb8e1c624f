#include "rednet/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rednet/error.hpp"

namespace rednet {

namespace {

constexpr char kMagic[4] = {'R', 'E', 'D', 'N'};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { little(v, 2); }
  void u32(std::uint32_t v) { little(v, 4); }
  void u64(std::uint64_t v) { little(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  void little(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(std::uint8_t(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return std::uint8_t(little(1)); }
  std::uint16_t u16() { return std::uint16_t(little(2)); }
  std::uint32_t u32() { return std::uint32_t(little(4)); }
  std::uint64_t u64() { return little(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::size_t pos() const { return pos_; }

 private:
  std::uint64_t little(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw FormatError("model file is truncated");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= std::uint64_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes lengths as uInt; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    crc = crc32(crc, bytes.data() + off, uInt(n));
    off += n;
  }
  return std::uint32_t(crc);
}

}  // namespace

std::vector<std::uint8_t> serialize_network(const Network<float>& net) {
  const auto& cfg = net.config();
  Writer w;
  w.raw(kMagic, 4);
  w.u16(kModelFormatVersion);
  w.u32(std::uint32_t(cfg.depth));
  w.u32(std::uint32_t(cfg.filters));
  w.u32(std::uint32_t(cfg.kernel));
  w.u32(std::uint32_t(cfg.channels));
  w.u8(std::uint8_t(cfg.skip.kind));
  w.u32(std::uint32_t(cfg.skip.step));
  w.u32(std::uint32_t(cfg.downsample_layers.size()));
  for (auto i : cfg.downsample_layers) w.u32(std::uint32_t(i));
  w.u64(cfg.init_seed);
  for (const auto& layer : net.layers()) {
    for (float v : layer.params.weights.data()) w.f32(v);
    for (float v : layer.params.bias) w.f32(v);
  }
  w.u32(crc_of(w.bytes()));
  return w.take();
}

Network<float> deserialize_network(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a model file: bad magic bytes");
  }
  if (bytes.size() < 4 + 2 + 4) throw FormatError("model file is truncated");
  Reader r(bytes.subspan(4));
  const std::uint16_t version = r.u16();
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version));
  }

  const std::size_t body = bytes.size() - 4;
  const std::uint32_t stored = std::uint32_t(bytes[body]) | (std::uint32_t(bytes[body + 1]) << 8) |
                               (std::uint32_t(bytes[body + 2]) << 16) |
                               (std::uint32_t(bytes[body + 3]) << 24);
  if (crc_of(bytes.first(body)) != stored) throw FormatError("model file checksum mismatch");

  NetworkConfig cfg;
  cfg.depth = r.u32();
  cfg.filters = r.u32();
  cfg.kernel = r.u32();
  cfg.channels = r.u32();
  const std::uint8_t kind = r.u8();
  if (kind > std::uint8_t(SkipKind::sequential)) {
    throw FormatError("model file has unknown skip kind " + std::to_string(kind));
  }
  cfg.skip.kind = SkipKind(kind);
  cfg.skip.step = r.u32();
  const std::uint32_t nds = r.u32();
  if (nds > cfg.depth) throw FormatError("model file has an implausible downsample list");
  for (std::uint32_t i = 0; i < nds; ++i) cfg.downsample_layers.push_back(r.u32());
  cfg.init_seed = r.u64();
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("model file holds an invalid configuration: ") + e.what());
  }

  // Reject payload sizes the file cannot hold before allocating anything.
  const double f = double(cfg.filters), c = double(cfg.channels), kk = double(cfg.kernel * cfg.kernel);
  const double min_params = 2.0 * f * c * kk + f + c + double(cfg.depth - 2) * (f * f * kk + f);
  if (4.0 * min_params > double(body)) throw FormatError("model file is truncated");

  // Shapes come from a freshly built network; the payload overwrites values.
  Network<float> net = build_network<float>(cfg);
  for (auto p : net.parameters()) {
    if (4 + r.pos() + 4 * p.size() > body) throw FormatError("model file is truncated");
    for (auto& v : p) v = r.f32();
  }
  if (4 + r.pos() != body) throw FormatError("model file has trailing bytes");
  return net;
}

void save_network(const Network<float>& net, const std::filesystem::path& path) {
  const auto bytes = serialize_network(net);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!os) throw Error("failed writing '" + path.string() + "'");
}

Network<float> load_network(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open model file '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return deserialize_network(bytes);
}

}  // namespace rednet
