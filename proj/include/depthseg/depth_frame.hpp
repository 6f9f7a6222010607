#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace depthseg {

/// Depth in millimeters. 0 marks an invalid measurement.
using Depth = std::uint16_t;

/// Axis-aligned pixel rectangle; (x, y) is the top-left corner, x = column.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }   // exclusive
  int bottom() const { return y + h; }  // exclusive
  long long area() const { return static_cast<long long>(w) * h; }
  bool contains(int px, int py) const {
    return px >= x && px < right() && py >= y && py < bottom();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Intersection-over-union of two rectangles; 0 when either is empty.
double iou(const Rect& a, const Rect& b);

/// Row-major grid of depth samples.
class DepthFrame {
 public:
  DepthFrame() = default;
  /// Zero-filled frame. Throws std::invalid_argument unless width, height >= 1.
  DepthFrame(int width, int height);
  DepthFrame(int width, int height, std::vector<Depth> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  Depth at(int x, int y) const { return data_[index(x, y)]; }
  Depth& at(int x, int y) { return data_[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<const Depth> data() const { return data_; }
  std::span<Depth> data() { return data_; }
  std::span<const Depth> row(int y) const {
    return std::span<const Depth>(data_).subspan(index(0, y), width_);
  }

  Rect bounds() const { return Rect{0, 0, width_, height_}; }

  friend bool operator==(const DepthFrame&, const DepthFrame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Depth> data_;
};

/// One boolean per pixel, row-major. Used for ROIs and grown regions.
class PixelMask {
 public:
  PixelMask() = default;
  PixelMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool test(int x, int y) const { return bits_[index(x, y)] != 0; }
  bool test(std::size_t i) const { return bits_[i] != 0; }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }
  void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::size_t popcount() const;
  bool empty() const { return popcount() == 0; }

  /// Tight bounding box of the set pixels; {0,0,0,0} for an empty mask.
  Rect bbox() const;

  /// Clears every bit that is set in `other`. Dimensions must match.
  void subtract(const PixelMask& other);

  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const PixelMask&, const PixelMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// |a ∩ b| / |a ∪ b| over two same-sized masks; 0 when both are empty.
double mask_iou(const PixelMask& a, const PixelMask& b);

/// Number of pixels set in both masks.
std::size_t intersection_count(const PixelMask& a, const PixelMask& b);

/// Copies the window `rect` out of `frame`. Throws std::out_of_range when the
/// rect is empty or leaves the frame.
DepthFrame crop(const DepthFrame& frame, const Rect& rect);
PixelMask crop(const PixelMask& mask, const Rect& rect);

/// Number of pixels with a nonzero depth.
std::size_t valid_pixel_count(const DepthFrame& frame);

/// Throws std::out_of_range unless rect is nonempty and inside a width x height grid.
void check_rect_within(const Rect& rect, int width, int height);

}  // namespace depthseg
