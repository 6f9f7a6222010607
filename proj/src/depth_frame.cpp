#include "depthseg/depth_frame.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace depthseg {

double iou(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  const long long inter =
      (x1 > x0 && y1 > y0) ? static_cast<long long>(x1 - x0) * (y1 - y0) : 0;
  const long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

DepthFrame::DepthFrame(int width, int height)
    : DepthFrame(width, height,
                 std::vector<Depth>(static_cast<std::size_t>(std::max(width, 0)) *
                                    static_cast<std::size_t>(std::max(height, 0)))) {}

DepthFrame::DepthFrame(int width, int height, std::vector<Depth> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("depth frame dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("depth frame data length does not match " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
}

PixelMask::PixelMask(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("mask dimensions must be positive");
  }
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t PixelMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Rect PixelMask::bbox() const {
  int x0 = width_, y0 = height_, x1 = -1, y1 = -1;
  for (int y = 0; y < height_; ++y) {
    const std::uint8_t* row = bits_.data() + index(0, y);
    for (int x = 0; x < width_; ++x) {
      if (row[x]) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) return Rect{};
  return Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

void PixelMask::subtract(const PixelMask& other) {
  if (other.width_ != width_ || other.height_ != height_) {
    throw std::invalid_argument("mask dimensions differ");
  }
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    bits_[i] &= static_cast<std::uint8_t>(other.bits_[i] ^ 1u);
  }
}

std::size_t intersection_count(const PixelMask& a, const PixelMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument("mask dimensions differ");
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += (a.test(i) && b.test(i)) ? 1 : 0;
  return n;
}

double mask_iou(const PixelMask& a, const PixelMask& b) {
  const std::size_t inter = intersection_count(a, b);
  const std::size_t uni = a.popcount() + b.popcount() - inter;
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

void check_rect_within(const Rect& rect, int width, int height) {
  if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0 || rect.right() > width ||
      rect.bottom() > height) {
    throw std::out_of_range("rect {" + std::to_string(rect.x) + "," + std::to_string(rect.y) +
                            "," + std::to_string(rect.w) + "," + std::to_string(rect.h) +
                            "} outside " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
}

DepthFrame crop(const DepthFrame& frame, const Rect& rect) {
  check_rect_within(rect, frame.width(), frame.height());
  std::vector<Depth> out;
  out.reserve(static_cast<std::size_t>(rect.area()));
  for (int y = rect.y; y < rect.bottom(); ++y) {
    const auto src = frame.row(y).subspan(rect.x, rect.w);
    out.insert(out.end(), src.begin(), src.end());
  }
  return DepthFrame(rect.w, rect.h, std::move(out));
}

PixelMask crop(const PixelMask& mask, const Rect& rect) {
  check_rect_within(rect, mask.width(), mask.height());
  PixelMask out(rect.w, rect.h);
  for (int y = 0; y < rect.h; ++y) {
    for (int x = 0; x < rect.w; ++x) {
      if (mask.test(rect.x + x, rect.y + y)) out.set(x, y);
    }
  }
  return out;
}

std::size_t valid_pixel_count(const DepthFrame& frame) {
  const auto d = frame.data();
  return static_cast<std::size_t>(
      std::count_if(d.begin(), d.end(), [](Depth v) { return v != 0; }));
}

}  // namespace depthseg
