#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rednet/blur.hpp"
#include "rednet/corruption.hpp"
#include "rednet/image.hpp"
#include "rednet/metrics.hpp"
#include "rednet/resample.hpp"
#include "rednet/text.hpp"
#include "synthetic.hpp"

using namespace rednet;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    RngStream rng(std::uint64_t(reinterpret_cast<std::uintptr_t>(this)));
    path_ = fs::temp_directory_path() / ("rednet_data_test_" + std::to_string(rng.next_u64()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_bytes(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  os << s;
}

Image random_integer_image(std::size_t h, std::size_t w, std::uint64_t seed) {
  RngStream rng(seed);
  Image img(h, w);
  for (auto& p : img.px) p = float(rng.uniform_index(256));
  return img;
}

double kernel_sum(const BlurKernel& k) {
  double s = 0.0;
  for (double t : k.taps) s += t;
  return s;
}

}  // namespace

TEST(Pgm, RoundTripIntegerImage) {
  TempDir dir;
  const auto img = random_integer_image(17, 23, 1);
  write_pgm(img, dir.path() / "a.pgm");
  EXPECT_EQ(read_pgm(dir.path() / "a.pgm"), img);
}

TEST(Pgm, ClampsAndRounds) {
  TempDir dir;
  Image img(1, 5);
  img.px = {255.7f, -3.0f, 10.5f, 10.49f, 300.0f};
  write_pgm(img, dir.path() / "c.pgm");
  EXPECT_EQ(read_pgm(dir.path() / "c.pgm").px, (std::vector<float>{255, 0, 11, 10, 255}));
}

TEST(Pgm, HeaderWithComments) {
  TempDir dir;
  write_bytes(dir.path() / "h.pgm", std::string("P5\n# made by hand\n2 1\n255\n") + "\x05\xff");
  const auto img = read_pgm(dir.path() / "h.pgm");
  EXPECT_EQ(img.h, 1u);
  EXPECT_EQ(img.w, 2u);
  EXPECT_EQ(img.px, (std::vector<float>{5, 255}));
}

TEST(Pgm, Errors) {
  TempDir dir;
  write_bytes(dir.path() / "ascii.pgm", "P2\n2 2\n255\n1 2 3 4\n");
  try {
    read_pgm(dir.path() / "ascii.pgm");
    FAIL() << "P2 accepted";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported"), std::string::npos);
  }
  write_bytes(dir.path() / "short.pgm", "P5\n4 4\n255\nabc");
  EXPECT_THROW(read_pgm(dir.path() / "short.pgm"), FormatError);
  write_bytes(dir.path() / "deep.pgm", "P5\n1 1\n65535\n\x01\x02");
  EXPECT_THROW(read_pgm(dir.path() / "deep.pgm"), FormatError);
  write_bytes(dir.path() / "hdr.pgm", "P5\n4");
  EXPECT_THROW(read_pgm(dir.path() / "hdr.pgm"), FormatError);
  EXPECT_THROW(read_pgm(dir.path() / "missing.pgm"), Error);
}

TEST(Pgm, DirectoryLoaders) {
  TempDir dir;
  write_pgm(Image(4, 4, 1.0f), dir.path() / "b.pgm");
  write_pgm(Image(4, 4, 2.0f), dir.path() / "a.pgm");
  write_bytes(dir.path() / "notes.txt", "x");
  const auto imgs = load_pgm_dir(dir.path());
  ASSERT_EQ(imgs.size(), 2u);
  EXPECT_EQ(imgs[0].px[0], 2.0f);

  TempDir pairs;
  write_pgm(Image(3, 3, 7.0f), pairs.path() / "x.clean.pgm");
  write_pgm(Image(3, 3, 9.0f), pairs.path() / "x.corrupt.pgm");
  const auto ps = load_pairdir(pairs.path());
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].name, "x");
  EXPECT_EQ(ps[0].clean.px[0], 7.0f);
  EXPECT_EQ(ps[0].corrupted.px[0], 9.0f);
  write_pgm(Image(3, 3), pairs.path() / "y.clean.pgm");
  EXPECT_THROW(load_pairdir(pairs.path()), Error);
}

TEST(Image, TensorConversion) {
  const auto img = random_integer_image(3, 4, 2);
  const auto t = to_tensor<float>(img);
  EXPECT_EQ(t.shape(), (Shape{1, 1, 3, 4}));
  EXPECT_EQ(to_image(t), img);
  const auto b = stack<float>({&img, &img});
  EXPECT_EQ(b.shape(), (Shape{2, 1, 3, 4}));
  Image other(2, 2);
  EXPECT_THROW(stack<float>({&img, &other}), ShapeError);
}

TEST(Patches, Counts) {
  EXPECT_EQ(extract_patches(Image(100, 100), 50, 25).size(), 9u);
  EXPECT_EQ(extract_patches(Image(50, 50), 50, 1).size(), 1u);
  EXPECT_EQ(extract_patches(Image(60, 100), 50, 25).size(), 3u);
  EXPECT_THROW(extract_patches(Image(40, 100), 50, 25), ValueError);
  EXPECT_THROW(extract_patches(Image(60, 60), 50, 0), ValueError);
}

TEST(Patches, WholeImageAndContents) {
  const auto img = random_integer_image(6, 6, 3);
  const auto one = extract_patches(img, 6, 3);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], img);
  const auto ps = extract_patches(img, 3, 3);
  ASSERT_EQ(ps.size(), 4u);
  EXPECT_EQ(ps[1].at(0, 0), img.at(0, 3));
  EXPECT_EQ(ps[2].at(2, 1), img.at(5, 1));
}

TEST(Noise, SigmaZeroIsIdentity) {
  RngStream rng(1);
  const auto img = random_integer_image(8, 8, 4);
  EXPECT_EQ(add_gaussian_noise(img, 0.0, rng), img);
}

TEST(Noise, Seventy) {
  RngStream rng(5);
  const Image clean(1000, 1000, 128.0f);
  const Image noisy = add_gaussian_noise(clean, 70.0, rng);
  EXPECT_NEAR(psnr(noisy, clean), 20 * std::log10(255.0 / 70.0), 0.1);
  double mean = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) mean += noisy.px[i] - clean.px[i];
  EXPECT_NEAR(mean / double(clean.size()), 0.0, 0.28);
  bool unclipped = false;
  for (float p : noisy.px) unclipped |= p < 0.0f || p > 255.0f;
  EXPECT_TRUE(unclipped);
}

TEST(Bicubic, KernelValues) {
  EXPECT_EQ(cubic_kernel(0.0), 1.0);
  EXPECT_EQ(cubic_kernel(1.0), 0.0);
  EXPECT_EQ(cubic_kernel(2.0), 0.0);
  EXPECT_DOUBLE_EQ(cubic_kernel(0.5), 0.5625);
  EXPECT_DOUBLE_EQ(cubic_kernel(1.5), -0.0625);
  EXPECT_DOUBLE_EQ(cubic_kernel(-1.5), cubic_kernel(1.5));
}

TEST(Bicubic, SameSizeIsIdentity) {
  const auto img = random_integer_image(9, 13, 6);
  EXPECT_EQ(bicubic_resize(img, 9, 13), img);
}

TEST(Bicubic, ConstantStaysConstant) {
  const Image img(10, 7, 42.0f);
  for (auto [h, w] : {std::pair{20, 14}, {5, 3}, {13, 29}, {4, 7}}) {
    const auto out = bicubic_resize(img, std::size_t(h), std::size_t(w));
    for (float p : out.px) EXPECT_NEAR(p, 42.0f, 1e-4f);
  }
}

TEST(Bicubic, UpsampledRampIsReproduced) {
  Image ramp(12, 16);
  for (std::size_t y = 0; y < 12; ++y)
    for (std::size_t x = 0; x < 16; ++x) ramp.at(y, x) = float(3.0 * double(x) + 1.0);
  const auto up = bicubic_resize(ramp, 24, 32);
  for (std::size_t y = 0; y < 24; ++y)
    for (std::size_t x = 4; x < 28; ++x) {
      const double src = (double(x) + 0.5) / 2.0 - 0.5;
      EXPECT_NEAR(up.at(y, x), 3.0 * src + 1.0, 1e-3);
    }
}

TEST(DegradeSr, ShapeAndConstant) {
  EXPECT_EQ(degrade_sr(Image(63, 47, 1.0f), 4).h, 63u);
  EXPECT_EQ(degrade_sr(Image(63, 47, 1.0f), 4).w, 47u);
  for (float p : degrade_sr(Image(30, 30, 77.0f), 3).px) EXPECT_NEAR(p, 77.0f, 1e-3f);
  EXPECT_THROW(degrade_sr(Image(30, 30), 5), ValueError);
}

TEST(DegradeSr, DegradationGrowsWithScale) {
  RngStream rng(7);
  const Image img = rednet::testing::synthetic_image(96, 96, rng);
  const double p2 = psnr(degrade_sr(img, 2), img);
  const double p3 = psnr(degrade_sr(img, 3), img);
  const double p4 = psnr(degrade_sr(img, 4), img);
  EXPECT_TRUE(std::isfinite(p2));
  EXPECT_GT(p2, p3);
  EXPECT_GT(p3, p4);
}

TEST(BlurKernel, Normalisation) {
  for (const BlurKernelSpec& s :
       std::vector<BlurKernelSpec>{DiskBlur{1.0}, DiskBlur{2.5}, DiskBlur{7.0}, GaussianBlur{0.6},
                                   GaussianBlur{1.6, 25}, MotionBlur{9, 0.0}, MotionBlur{7, 37.0},
                                   MotionBlur{15, 135.0}}) {
    const auto k = build_blur_kernel(s);
    EXPECT_EQ(k.size % 2, 1u);
    EXPECT_NEAR(kernel_sum(k), 1.0, 1e-6);
    for (double t : k.taps) EXPECT_GE(t, 0.0);
  }
  EXPECT_EQ(build_blur_kernel(GaussianBlur{1.0}).size, 7u);
  EXPECT_THROW(build_blur_kernel(GaussianBlur{1.0, 4}), ValueError);
  EXPECT_THROW(build_blur_kernel(DiskBlur{0.5}), ValueError);
}

TEST(BlurKernel, DiskRadiusOneIsCross) {
  const auto k = build_blur_kernel(DiskBlur{1.0});
  ASSERT_EQ(k.size, 3u);
  const std::vector<double> expect{0, 0.2, 0, 0.2, 0.2, 0.2, 0, 0.2, 0};
  for (std::size_t i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(k.taps[i], expect[i]);
}

TEST(BlurKernel, MotionLengthOneIsDelta) {
  const auto k = build_blur_kernel(MotionBlur{1, 45.0});
  ASSERT_EQ(k.size, 1u);
  EXPECT_EQ(k.taps[0], 1.0);
}

TEST(BlurKernel, HorizontalMotionIsARow) {
  const auto k = build_blur_kernel(MotionBlur{5, 0.0});
  ASSERT_EQ(k.size, 5u);
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 5; ++x) EXPECT_DOUBLE_EQ(k.at(y, x), y == 2 ? 0.2 : 0.0);
}

TEST(BlurImage, DeltaAndConstant) {
  const auto img = random_integer_image(7, 9, 8);
  EXPECT_EQ(blur_image(img, build_blur_kernel(MotionBlur{1, 0.0})), img);
  for (float p : blur_image(Image(8, 8, 50.0f), build_blur_kernel(DiskBlur{3.0})).px)
    EXPECT_NEAR(p, 50.0f, 1e-4f);
}

TEST(BlurImage, BorderClampConvention) {
  Image img(3, 3);
  img.at(1, 1) = 9.0f;
  BlurKernel box{3, std::vector<double>(9, 1.0 / 9.0)};
  const auto out = blur_image(img, box);
  // Clamped sampling: every 3x3 neighbourhood sees the centre exactly once.
  for (float p : out.px) EXPECT_NEAR(p, 1.0f, 1e-6f);

  Image corner(3, 3);
  corner.at(0, 0) = 9.0f;
  const auto c = blur_image(corner, box);
  EXPECT_NEAR(c.at(0, 0), 4.0f, 1e-6f);
  EXPECT_NEAR(c.at(0, 1), 2.0f, 1e-6f);
  EXPECT_NEAR(c.at(1, 1), 1.0f, 1e-6f);
  EXPECT_NEAR(c.at(2, 2), 0.0f, 1e-6f);
}

TEST(Text, MaskMarksChangedPixels) {
  RngStream rng(9);
  const Image img(64, 64, 100.0f);
  const auto t = overlay_text(img, 10, 0.1, 255.0f, rng);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const bool diff = t.image.px[i] != img.px[i];
    EXPECT_EQ(diff, t.mask[i] == 1);
    changed += diff;
  }
  EXPECT_EQ(changed, t.overwritten);
  EXPECT_GE(t.overwritten, std::size_t(std::ceil(0.1 * 64 * 64)));
}

TEST(Text, CoverageWithinTolerance) {
  for (std::size_t gh : {10u, 20u}) {
    RngStream rng(10 + gh);
    const Image img(128, 128, 255.0f);
    const auto t = overlay_text(img, gh, 0.2, 0.0f, rng);
    std::size_t zeros = 0;
    for (float p : t.image.px) zeros += p == 0.0f;
    const double frac = double(zeros) / double(img.size());
    EXPECT_NEAR(frac, 0.2, 0.2 * 0.2);
  }
}

TEST(Text, TinyCoverageChangesAtMostOneGlyph) {
  RngStream rng(11);
  const Image img(80, 80, 0.0f);
  const auto t = overlay_text(img, 14, 1e-6, 255.0f, rng);
  EXPECT_GE(t.overwritten, 1u);
  EXPECT_LE(t.overwritten, 14u * 10u);
}

TEST(Text, Errors) {
  RngStream rng(12);
  EXPECT_THROW(overlay_text(Image(10, 10), 4, 0.1, 255.0f, rng), ValueError);
  EXPECT_THROW(overlay_text(Image(10, 10), 8, 1.0, 255.0f, rng), ValueError);
}

TEST(Corruption, ParseRoundTrip) {
  for (const std::string s :
       {"gaussian:30", "sr:3", "blur:disk:5", "blur:gaussian:1.6:25", "blur:motion:9:45",
        "text:10:0.1:255", "blind:gaussian:10,gaussian:70", "blind:sr:2,sr:3,sr:4"}) {
    EXPECT_EQ(to_string(parse_corruption(s)), s);
  }
  EXPECT_EQ(to_string(parse_corruption("text:10:0.1")), "text:10:0.1:255");
  EXPECT_TRUE(std::holds_alternative<PairDir>(parse_corruption("pairdir:/tmp/x")));
}

TEST(Corruption, ParseErrors) {
  for (const std::string s : {"", "gaussian", "gaussian:-1", "gaussian:abc", "sr:5", "sr:2.5",
                              "blur:box:3", "blur:disk", "text:10", "jpeg:10", "blind:",
                              "blind:pairdir:x", "text:10:1.5", "pairdir:"}) {
    EXPECT_THROW(parse_corruption(s), ValueError) << s;
  }
}

TEST(Corruption, GaussianZeroIdentity) {
  RngStream rng(13);
  const auto img = random_integer_image(10, 10, 14);
  EXPECT_EQ(corrupt(img, GaussianNoise{0.0}, rng), img);
  EXPECT_FALSE(is_stochastic(GaussianNoise{0.0}));
  EXPECT_TRUE(is_stochastic(GaussianNoise{1.0}));
  EXPECT_FALSE(is_stochastic(SuperResolution{2}));
  EXPECT_TRUE(is_stochastic(parse_corruption("text:10:0.1")));
}

TEST(Corruption, BlindChoosesUniformly) {
  const auto spec = parse_corruption("blind:gaussian:10,gaussian:70");
  RngStream rng(15);
  const Image img(4, 4, 128.0f);
  int high = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto out = corrupt(img, spec, rng);
    double sq = 0.0;
    for (std::size_t k = 0; k < img.size(); ++k) sq += (out.px[k] - 128.0) * (out.px[k] - 128.0);
    // With 16 pixels the empirical std separates 10 and 70 reliably.
    high += std::sqrt(sq / double(img.size())) > 30.0;
  }
  EXPECT_NEAR(double(high) / n, 0.5, 0.02);
}

TEST(Corruption, PreservesShapeAndIsDeterministic) {
  const auto img = random_integer_image(37, 29, 16);
  for (const std::string s : {"gaussian:25", "sr:2", "sr:4", "blur:disk:3", "blur:motion:7:30",
                              "text:10:0.2", "blind:sr:3,blur:gaussian:2"}) {
    const auto spec = parse_corruption(s);
    RngStream a(17), b(17);
    const auto x = corrupt(img, spec, a);
    EXPECT_TRUE(x.same_shape(img)) << s;
    EXPECT_EQ(x, corrupt(img, spec, b)) << s;
  }
  RngStream rng(1);
  EXPECT_THROW(corrupt(img, PairDir{"x"}, rng), ValueError);
}
