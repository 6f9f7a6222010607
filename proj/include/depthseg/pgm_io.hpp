#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "depthseg/depth_frame.hpp"

namespace depthseg {

/// Raised by the PGM reader and writers. kind() tells the failures apart.
class PgmError : public std::runtime_error {
 public:
  enum class Kind { kOpen, kMalformedHeader, kUnsupportedMaxval, kTruncatedPayload, kWrite };

  PgmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads a binary 16-bit PGM (P5, maxval 65535, big-endian samples).
DepthFrame load_depth_frame(const std::filesystem::path& path);

/// Writes `frame` as a binary 16-bit PGM. Round-trips bit-exactly with load_depth_frame.
void save_depth_frame(const DepthFrame& frame, const std::filesystem::path& path);

/// In-memory forms of the two functions above.
DepthFrame decode_depth_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_depth_pgm(const DepthFrame& frame);

/// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Writes an 8-bit PGM (maxval 255).
void save_gray_pgm(const GrayImage& image, const std::filesystem::path& path);

/// Reads an 8-bit PGM (maxval 255).
GrayImage load_gray_pgm(const std::filesystem::path& path);

/// Mask as 8-bit PGM: 0 outside, 255 inside.
void save_mask_pgm(const PixelMask& mask, const std::filesystem::path& path);

}  // namespace depthseg
