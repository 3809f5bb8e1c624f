#include "rednet/corruption.hpp"

#include <charconv>
#include <cmath>

#include "rednet/error.hpp"
#include "rednet/resample.hpp"
#include "rednet/text.hpp"

namespace rednet {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(const std::string& s, const std::string& whole) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValueError("bad number '" + s + "' in corruption spec '" + whole + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& s, const std::string& whole) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValueError("bad integer '" + s + "' in corruption spec '" + whole + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void expect_args(const std::vector<std::string>& parts, std::size_t lo, std::size_t hi,
                 const std::string& whole) {
  if (parts.size() < lo || parts.size() > hi) {
    throw ValueError("wrong number of fields in corruption spec '" + whole + "'");
  }
}

[[noreturn]] void bad_kind(const std::string& kind, const std::string& whole) {
  throw ValueError("unknown corruption kind '" + kind + "' in '" + whole + "'");
}

}  // namespace

CorruptionSpec parse_corruption(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "blind") {
    if (colon == std::string::npos) throw ValueError("blind spec needs a list: '" + text + "'");
    Blind b;
    for (const auto& item : split(text.substr(colon + 1), ',')) {
      b.choices.push_back(parse_corruption(item));
    }
    CorruptionSpec spec = std::move(b);
    validate(spec);
    return spec;
  }
  if (kind == "pairdir") {
    if (colon == std::string::npos || colon + 1 == text.size()) {
      throw ValueError("pairdir spec needs a path: '" + text + "'");
    }
    return PairDir{text.substr(colon + 1)};
  }

  const auto parts = split(text, ':');
  CorruptionSpec spec;
  if (kind == "gaussian") {
    expect_args(parts, 2, 2, text);
    spec = GaussianNoise{parse_real(parts[1], text)};
  } else if (kind == "sr") {
    expect_args(parts, 2, 2, text);
    spec = SuperResolution{parse_count(parts[1], text)};
  } else if (kind == "blur") {
    if (parts.size() < 3) throw ValueError("blur spec needs a kernel: '" + text + "'");
    const std::string& k = parts[1];
    if (k == "disk") {
      expect_args(parts, 3, 3, text);
      spec = Blur{DiskBlur{parse_real(parts[2], text)}};
    } else if (k == "gaussian") {
      expect_args(parts, 3, 4, text);
      GaussianBlur g{parse_real(parts[2], text), 0};
      if (parts.size() == 4) g.size = parse_count(parts[3], text);
      spec = Blur{g};
    } else if (k == "motion") {
      expect_args(parts, 4, 4, text);
      spec = Blur{MotionBlur{parse_count(parts[2], text), parse_real(parts[3], text)}};
    } else {
      bad_kind("blur:" + k, text);
    }
  } else if (kind == "text") {
    expect_args(parts, 3, 4, text);
    Text t{parse_count(parts[1], text), parse_real(parts[2], text), 255.0f};
    if (parts.size() == 4) t.fill = float(parse_real(parts[3], text));
    spec = t;
  } else {
    bad_kind(kind, text);
  }
  validate(spec);
  return spec;
}

std::string to_string(const CorruptionSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GaussianNoise>) {
          return "gaussian:" + fmt(s.sigma);
        } else if constexpr (std::is_same_v<S, SuperResolution>) {
          return "sr:" + std::to_string(s.scale);
        } else if constexpr (std::is_same_v<S, Blur>) {
          return std::visit(
              [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, DiskBlur>) {
                  return "blur:disk:" + fmt(k.radius);
                } else if constexpr (std::is_same_v<K, GaussianBlur>) {
                  return "blur:gaussian:" + fmt(k.sigma) +
                         (k.size ? ":" + std::to_string(k.size) : std::string());
                } else {
                  return "blur:motion:" + std::to_string(k.length) + ":" + fmt(k.angle_deg);
                }
              },
              s.kernel);
        } else if constexpr (std::is_same_v<S, Text>) {
          return "text:" + std::to_string(s.glyph_height) + ":" + fmt(s.coverage) + ":" +
                 fmt(double(s.fill));
        } else if constexpr (std::is_same_v<S, PairDir>) {
          return "pairdir:" + s.path.string();
        } else {
          std::string out = "blind:";
          for (std::size_t i = 0; i < s.choices.size(); ++i) {
            if (i) out += ',';
            out += to_string(s.choices[i]);
          }
          return out;
        }
      },
      spec);
}

void validate(const CorruptionSpec& spec) {
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GaussianNoise>) {
          if (!(s.sigma >= 0.0)) throw ValueError("noise sigma must be >= 0");
        } else if constexpr (std::is_same_v<S, SuperResolution>) {
          if (s.scale < 2 || s.scale > 4) throw ValueError("super-resolution scale must be 2, 3 or 4");
        } else if constexpr (std::is_same_v<S, Blur>) {
          (void)build_blur_kernel(s.kernel);
        } else if constexpr (std::is_same_v<S, Text>) {
          if (s.glyph_height < 5) throw ValueError("text glyph height must be >= 5");
          if (!(s.coverage > 0.0 && s.coverage < 1.0)) {
            throw ValueError("text coverage must lie in (0, 1)");
          }
        } else if constexpr (std::is_same_v<S, Blind>) {
          if (s.choices.empty()) throw ValueError("blind spec needs at least one choice");
          for (const auto& c : s.choices) {
            if (std::holds_alternative<PairDir>(c)) {
              throw ValueError("blind spec cannot contain pairdir");
            }
            validate(c);
          }
        }
      },
      spec);
}

bool is_stochastic(const CorruptionSpec& spec) {
  if (const auto* g = std::get_if<GaussianNoise>(&spec)) return g->sigma > 0.0;
  return std::holds_alternative<Text>(spec) || std::holds_alternative<Blind>(spec);
}

Image add_gaussian_noise(const Image& img, double sigma, RngStream& rng) {
  if (!(sigma >= 0.0)) throw ValueError("noise sigma must be >= 0");
  Image out = img;
  if (sigma == 0.0) return out;
  for (auto& p : out.px) p = float(double(p) + sigma * rng.normal());
  return out;
}

Image corrupt(const Image& img, const CorruptionSpec& spec, RngStream& rng) {
  return std::visit(
      [&](const auto& s) -> Image {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GaussianNoise>) {
          return add_gaussian_noise(img, s.sigma, rng);
        } else if constexpr (std::is_same_v<S, SuperResolution>) {
          return degrade_sr(img, s.scale);
        } else if constexpr (std::is_same_v<S, Blur>) {
          return blur_image(img, build_blur_kernel(s.kernel));
        } else if constexpr (std::is_same_v<S, Text>) {
          return overlay_text(img, s.glyph_height, s.coverage, s.fill, rng).image;
        } else if constexpr (std::is_same_v<S, PairDir>) {
          throw ValueError("pairdir corruption is loaded from '" + s.path.string() +
                           "', not synthesised");
        } else {
          if (s.choices.empty()) throw ValueError("blind spec needs at least one choice");
          return corrupt(img, s.choices[rng.uniform_index(s.choices.size())], rng);
        }
      },
      spec);
}

}  // namespace rednet
