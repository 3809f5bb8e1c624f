#include "rednet/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>

namespace rednet {

template <typename T>
Tensor<T> to_tensor(const Image& img) {
  if (img.h == 0 || img.w == 0) throw ShapeError("cannot convert an empty image to a tensor");
  return Tensor<T>(Shape{1, 1, img.h, img.w}, std::vector<T>(img.px.begin(), img.px.end()));
}

template <typename T>
Image to_image(const Tensor<T>& t) {
  if (t.n() != 1 || t.c() != 1) {
    throw ShapeError("only single-channel single-image tensors convert to images, got " +
                     t.shape().str());
  }
  Image img;
  img.h = t.h();
  img.w = t.w();
  img.px.assign(t.data().begin(), t.data().end());
  return img;
}

template <typename T>
Tensor<T> stack(const std::vector<const Image*>& images) {
  if (images.empty()) throw ShapeError("cannot stack zero images");
  const std::size_t h = images.front()->h, w = images.front()->w;
  Tensor<T> t(Shape{images.size(), 1, h, w});
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i]->h != h || images[i]->w != w) throw ShapeError("stacked images differ in size");
    std::copy(images[i]->px.begin(), images[i]->px.end(), t.sample(i).begin());
  }
  return t;
}

template Tensor<float> to_tensor(const Image&);
template Tensor<double> to_tensor(const Image&);
template Image to_image(const Tensor<float>&);
template Image to_image(const Tensor<double>&);
template Tensor<float> stack(const std::vector<const Image*>&);
template Tensor<double> stack(const std::vector<const Image*>&);

namespace {

class HeaderParser {
 public:
  HeaderParser(const std::vector<unsigned char>& bytes, const std::string& name)
      : bytes_(bytes), name_(name) {}

  std::string token() {
    skip_space();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      tok.push_back(char(bytes_[pos_++]));
    }
    if (tok.empty()) throw FormatError(name_ + ": truncated PGM header");
    return tok;
  }

  std::size_t number() {
    const std::string tok = token();
    if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(c); }) ||
        tok.size() > 9) {
      throw FormatError(name_ + ": bad number '" + tok + "' in PGM header");
    }
    return std::stoul(tok);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError(name_ + ": truncated PGM header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const std::string& name_;
  std::size_t pos_ = 0;
};

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + name + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  HeaderParser hp(bytes, name);
  const std::string magic = hp.token();
  if (magic != "P5") {
    throw FormatError(name + ": unsupported image format '" + magic +
                      "' (only binary PGM P5 is read)");
  }
  const std::size_t w = hp.number();
  const std::size_t h = hp.number();
  const std::size_t maxval = hp.number();
  if (w == 0 || h == 0) throw FormatError(name + ": PGM has a zero extent");
  if (maxval != 255) {
    throw FormatError(name + ": PGM maxval " + std::to_string(maxval) + " unsupported (need 255)");
  }
  const std::size_t start = hp.raster_start();
  if (bytes.size() - start < w * h) throw FormatError(name + ": PGM raster is truncated");
  Image img(h, w);
  for (std::size_t i = 0; i < w * h; ++i) img.px[i] = float(bytes[start + i]);
  return img;
}

void write_pgm(const Image& img, const std::filesystem::path& path) {
  if (img.h == 0 || img.w == 0) throw ShapeError("cannot write an empty image");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os << "P5\n" << img.w << ' ' << img.h << "\n255\n";
  std::vector<unsigned char> raster(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = std::clamp(double(img.px[i]), 0.0, 255.0);
    raster[i] = static_cast<unsigned char>(std::floor(v + 0.5));
  }
  os.write(reinterpret_cast<const char*>(raster.data()), std::streamsize(raster.size()));
  if (!os) throw Error("failed writing '" + path.string() + "'");
}

std::vector<Image> extract_patches(const Image& img, std::size_t size, std::size_t stride) {
  if (stride < 1) throw ValueError("patch stride must be >= 1");
  if (size < 1 || size > img.h || size > img.w) {
    throw ValueError("patch size " + std::to_string(size) + " exceeds image " +
                     std::to_string(img.h) + "x" + std::to_string(img.w));
  }
  std::vector<Image> patches;
  for (std::size_t y = 0; y + size <= img.h; y += stride) {
    for (std::size_t x = 0; x + size <= img.w; x += stride) {
      Image p(size, size);
      for (std::size_t r = 0; r < size; ++r) {
        std::copy_n(img.px.begin() + std::ptrdiff_t((y + r) * img.w + x), size,
                    p.px.begin() + std::ptrdiff_t(r * size));
      }
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error("'" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

std::vector<ImagePair> load_pairdir(const std::filesystem::path& dir) {
  std::map<std::string, std::pair<std::filesystem::path, std::filesystem::path>> found;
  for (const auto& f : sorted_entries(dir)) {
    const std::string name = f.filename().string();
    if (ends_with(name, ".clean.pgm")) {
      found[name.substr(0, name.size() - 10)].second = f;
    } else if (ends_with(name, ".corrupt.pgm")) {
      found[name.substr(0, name.size() - 12)].first = f;
    }
  }
  std::vector<ImagePair> pairs;
  for (const auto& [stem, files] : found) {
    if (files.first.empty() || files.second.empty()) {
      throw Error("pair directory '" + dir.string() + "': '" + stem +
                  "' lacks its .clean.pgm or .corrupt.pgm sibling");
    }
    pairs.push_back({stem, read_pgm(files.first), read_pgm(files.second)});
  }
  if (pairs.empty()) throw Error("pair directory '" + dir.string() + "' holds no pairs");
  return pairs;
}

std::vector<Image> load_pgm_dir(const std::filesystem::path& dir) {
  std::vector<Image> images;
  for (const auto& f : sorted_entries(dir)) {
    if (f.extension() == ".pgm") images.push_back(read_pgm(f));
  }
  if (images.empty()) throw Error("no .pgm images in '" + dir.string() + "'");
  return images;
}

}  // namespace rednet
