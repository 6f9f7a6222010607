#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "depthseg/depth_frame.hpp"
#include "depthseg/pgm_io.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;
using namespace depthseg;

namespace {

fs::path temp_file(const std::string& name) {
  auto dir = fs::temp_directory_path() / "depthseg_core_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, const std::string& header, std::vector<std::uint8_t> payload) {
  std::ofstream out(p, std::ios::binary);
  out << header;
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
}

std::vector<std::uint8_t> payload_of(const std::vector<std::uint8_t>& file) {
  // Header is three newline-terminated lines for files we write ourselves.
  int lines = 0;
  std::size_t i = 0;
  while (lines < 3) lines += file[i++] == '\n';
  return {file.begin() + static_cast<long>(i), file.end()};
}

PgmError::Kind load_kind(const fs::path& p) {
  try {
    load_depth_frame(p);
  } catch (const PgmError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << p;
  return PgmError::Kind::kWrite;
}

}  // namespace

TEST(Pgm, LoadsTwoByTwo) {
  auto p = temp_file("2x2.pgm");
  write_bytes(p, "P5\n2 2\n65535\n", {0x00, 0x00, 0x01, 0xF4, 0x01, 0xF4, 0x02, 0xBC});
  const DepthFrame f = load_depth_frame(p);
  EXPECT_EQ(f, DepthFrame(2, 2, {0, 500, 500, 700}));
}

TEST(Pgm, HeaderCommentsAreSkipped) {
  auto p = temp_file("comment.pgm");
  write_bytes(p, "P5\n# kinect\n1 1 # size\n65535\n", {0x03, 0xE8});
  EXPECT_EQ(load_depth_frame(p).at(0, 0), 1000);
}

TEST(Pgm, ErrorKindsAreDistinct) {
  auto p8 = temp_file("maxval255.pgm");
  write_bytes(p8, "P5\n2 1\n255\n", {1, 2});
  EXPECT_EQ(load_kind(p8), PgmError::Kind::kUnsupportedMaxval);
  try {
    load_depth_frame(p8);
  } catch (const PgmError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported maxval"), std::string::npos);
  }

  auto bad = temp_file("magic.pgm");
  write_bytes(bad, "P2\n2 1\n65535\n", {0, 1, 0, 2});
  EXPECT_EQ(load_kind(bad), PgmError::Kind::kMalformedHeader);

  auto dims = temp_file("dims.pgm");
  write_bytes(dims, "P5\n0 4\n65535\n", {});
  EXPECT_EQ(load_kind(dims), PgmError::Kind::kMalformedHeader);

  auto trunc = temp_file("trunc.pgm");
  write_bytes(trunc, "P5\n2 2\n65535\n", {0, 1, 0, 2, 0});
  EXPECT_EQ(load_kind(trunc), PgmError::Kind::kTruncatedPayload);

  EXPECT_EQ(load_kind(temp_file("does_not_exist.pgm")), PgmError::Kind::kOpen);
  EXPECT_EQ(load_kind(temp_file("")), PgmError::Kind::kOpen);
}

TEST(Pgm, EncodesBigEndianPayload) {
  EXPECT_EQ(payload_of(encode_depth_pgm(DepthFrame(1, 1, {0}))), (std::vector<std::uint8_t>{0x00, 0x00}));
  EXPECT_EQ(payload_of(encode_depth_pgm(DepthFrame(2, 1, {65535, 1}))),
            (std::vector<std::uint8_t>{0xFF, 0xFF, 0x00, 0x01}));
  const auto bytes = encode_depth_pgm(DepthFrame(2, 1, {65535, 1}));
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 13), "P5\n2 1\n65535\n");
}

TEST(Pgm, RandomFramesRoundTrip) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const DepthFrame f = testkit::random_frame(rng, 64, 64, 1, 65535, 0.2);
    auto p = temp_file("rt.pgm");
    save_depth_frame(f, p);
    EXPECT_EQ(load_depth_frame(p), f);
    EXPECT_EQ(decode_depth_pgm(encode_depth_pgm(f)), f);
  }
}

TEST(Pgm, SyntheticSceneRoundTrip) {
  const Scene s = gen_scene(testkit::bundled_scene("multi_person"));
  ASSERT_EQ(s.frame.width(), 640);
  auto p = temp_file("scene.pgm");
  save_depth_frame(s.frame, p);
  EXPECT_EQ(load_depth_frame(p), s.frame);
}

TEST(Pgm, FileRoundTripIsByteIdentical) {
  std::mt19937 rng(3);
  const DepthFrame f = testkit::random_frame(rng, 17, 9, 1, 4000, 0.1);
  auto a = temp_file("a.pgm"), b = temp_file("b.pgm");
  save_depth_frame(f, a);
  save_depth_frame(load_depth_frame(a), b);
  std::ifstream ia(a, std::ios::binary), ib(b, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(ia)), {}), sb((std::istreambuf_iterator<char>(ib)), {});
  EXPECT_EQ(sa, sb);
}

TEST(Pgm, GrayAndMaskWriters) {
  PixelMask m(3, 1);
  m.set(1, 0);
  auto p = temp_file("mask.pgm");
  save_mask_pgm(m, p);
  const GrayImage g = load_gray_pgm(p);
  EXPECT_EQ(g.width, 3);
  EXPECT_EQ(g.pixels, (std::vector<std::uint8_t>{0, 255, 0}));
}

TEST(Frame, RejectsDegenerateDimensions) {
  EXPECT_THROW(DepthFrame(0, 3), std::invalid_argument);
  EXPECT_THROW(DepthFrame(2, 2, {1, 2, 3}), std::invalid_argument);
}

TEST(Crop, PaperWindowSize) {
  const DepthFrame f(640, 480);
  const DepthFrame c = crop(f, Rect{100, 50, 460, 370});
  EXPECT_EQ(c.width(), 460);
  EXPECT_EQ(c.height(), 370);
}

TEST(Crop, FullRectIsIdentity) {
  std::mt19937 rng(1);
  const DepthFrame f = testkit::random_frame(rng, 31, 17, 0, 9000, 0.3);
  EXPECT_EQ(crop(f, f.bounds()), f);
}

TEST(Crop, InteriorOfRamp) {
  std::vector<Depth> v(16);
  for (int i = 0; i < 16; ++i) v[i] = static_cast<Depth>(i);
  const DepthFrame f(4, 4, v);
  EXPECT_EQ(crop(f, Rect{1, 1, 2, 2}), DepthFrame(2, 2, {5, 6, 9, 10}));
}

TEST(Crop, CopiesWindowValues) {
  std::mt19937 rng(2);
  const DepthFrame f = testkit::random_frame(rng, 40, 30, 0, 3000, 0.1);
  const Rect r{7, 3, 20, 11};
  const DepthFrame c = crop(f, r);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) ASSERT_EQ(c.at(x, y), f.at(r.x + x, r.y + y));
}

TEST(Crop, OutOfBoundsThrows) {
  const DepthFrame f(10, 10);
  EXPECT_THROW(crop(f, Rect{5, 5, 6, 1}), std::out_of_range);
  EXPECT_THROW(crop(f, Rect{-1, 0, 2, 2}), std::out_of_range);
  EXPECT_THROW(crop(f, Rect{0, 0, 0, 2}), std::out_of_range);
}

TEST(ValidCount, Examples) {
  EXPECT_EQ(valid_pixel_count(DepthFrame(2, 2, {0, 500, 500, 700})), 3u);
  EXPECT_EQ(valid_pixel_count(DepthFrame(5, 5)), 0u);
}

TEST(ValidCount, BlobOnZeroBackgroundMatchesOracle) {
  SceneSpec s;
  s.width = 200;
  s.height = 150;
  s.blobs = {testkit::rect_blob(10, 20, 50, 60, 1500, 5),
             BlobSpec{BlobSpec::Shape::kEllipse, Rect{100, 30, 70, 90}, 2100, 3}};
  const Scene sc = gen_scene(s);
  EXPECT_EQ(valid_pixel_count(sc.frame), sc.oracle.blob_counts[0] + sc.oracle.blob_counts[1]);
  EXPECT_EQ(sc.oracle.blob_counts[0], 3000u);
}

TEST(ValidCount, PlusZerosIsArea) {
  std::mt19937 rng(5);
  for (int t = 0; t < 10; ++t) {
    const DepthFrame f = testkit::random_frame(rng, 23, 19, 1, 100, 0.4);
    std::size_t zeros = 0;
    for (Depth d : f.data()) zeros += d == 0;
    EXPECT_EQ(valid_pixel_count(f) + zeros, f.size());
  }
}

TEST(Mask, BboxPopcountAndIou) {
  PixelMask a(6, 6), b(6, 6);
  EXPECT_EQ(a.bbox(), Rect{});
  a.set(1, 2);
  a.set(3, 4);
  EXPECT_EQ(a.bbox(), (Rect{1, 2, 3, 3}));
  b.set(3, 4);
  EXPECT_EQ(intersection_count(a, b), 1u);
  EXPECT_DOUBLE_EQ(mask_iou(a, b), 0.5);
  a.subtract(b);
  EXPECT_EQ(a.popcount(), 1u);
  EXPECT_DOUBLE_EQ(iou(Rect{0, 0, 2, 2}, Rect{1, 0, 2, 2}), 2.0 / 6.0);
}
