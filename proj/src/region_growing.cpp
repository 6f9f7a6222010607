#include "depthseg/region_growing.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace depthseg {
namespace {

struct Offset {
  int dx;
  int dy;
};

constexpr std::array<Offset, 8> kNeighbours{{
    {0, -1}, {1, 0}, {0, 1}, {-1, 0},     // N E S W
    {1, -1}, {1, 1}, {-1, 1}, {-1, -1},   // NE SE SW NW
}};

}  // namespace

void GrowthParams::validate() const {
  if (connectivity != 4 && connectivity != 8) {
    throw std::invalid_argument("connectivity must be 4 or 8");
  }
}

Seed find_seed(const PixelMask& mask, const DepthFrame& frame) {
  if (mask.width() != frame.width() || mask.height() != frame.height()) {
    throw std::invalid_argument("mask dimensions differ from frame");
  }
  std::vector<std::size_t> row_counts(static_cast<std::size_t>(mask.height()), 0);
  std::vector<std::size_t> col_counts(static_cast<std::size_t>(mask.width()), 0);
  std::size_t total = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.test(x, y)) {
        ++row_counts[y];
        ++col_counts[x];
        ++total;
      }
    }
  }
  if (total == 0) throw std::invalid_argument("cannot seed an empty mask");

  const int best_row =
      static_cast<int>(std::max_element(row_counts.begin(), row_counts.end()) - row_counts.begin());
  const int best_col =
      static_cast<int>(std::max_element(col_counts.begin(), col_counts.end()) - col_counts.begin());

  int sx = best_col, sy = best_row;
  if (!mask.test(best_col, best_row)) {
    // Raster order visits (y, x) lexicographically, so strict < keeps the tie rule.
    int best_dist = std::numeric_limits<int>::max();
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        if (!mask.test(x, y)) continue;
        const int d = std::abs(x - best_col) + std::abs(y - best_row);
        if (d < best_dist) {
          best_dist = d;
          sx = x;
          sy = y;
        }
      }
    }
  }
  return Seed{sx, sy, frame.at(sx, sy)};
}

int adaptive_threshold(const DepthHistogram& hist, Depth seed_depth) {
  const auto idx = hist.index_of(seed_depth);
  if (!idx) {
    throw std::invalid_argument("seed depth " + std::to_string(seed_depth) +
                                " is not in the histogram");
  }
  const std::size_t i = *idx;
  int gap = 0;
  if (i + 1 < hist.size()) gap = std::max(gap, hist.values[i + 1] - hist.values[i]);
  if (i > 0) gap = std::max(gap, hist.values[i] - hist.values[i - 1]);
  return std::max(gap, 1);
}

GrownRegion grow_region(const DepthFrame& frame, const PixelMask& roi, const Seed& seed,
                        int t_h, const GrowthParams& params) {
  params.validate();
  if (roi.width() != frame.width() || roi.height() != frame.height()) {
    throw std::invalid_argument("roi dimensions differ from frame");
  }
  if (seed.x < 0 || seed.y < 0 || seed.x >= frame.width() || seed.y >= frame.height() ||
      !roi.test(seed.x, seed.y)) {
    throw std::invalid_argument("seed outside roi");
  }

  const int w = frame.width();
  const int h = frame.height();
  const auto neighbours = std::span(kNeighbours).first(static_cast<std::size_t>(params.connectivity));

  GrownRegion region;
  region.mask = PixelMask(w, h);
  region.seed = Seed{seed.x, seed.y, frame.at(seed.x, seed.y)};
  region.threshold_used = t_h;

  std::vector<std::size_t> queue;
  queue.reserve(1024);
  queue.push_back(frame.index(seed.x, seed.y));
  region.mask.set(queue.front());

  int x0 = seed.x, x1 = seed.x, y0 = seed.y, y1 = seed.y;
  double depth_sum = 0.0;
  const auto data = frame.data();

  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t p = queue[head];
    const int px = static_cast<int>(p % static_cast<std::size_t>(w));
    const int py = static_cast<int>(p / static_cast<std::size_t>(w));
    const Depth pd = data[p];
    depth_sum += pd;
    x0 = std::min(x0, px);
    x1 = std::max(x1, px);
    y0 = std::min(y0, py);
    y1 = std::max(y1, py);

    for (const auto& o : neighbours) {
      const int qx = px + o.dx;
      const int qy = py + o.dy;
      if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
      const std::size_t q = frame.index(qx, qy);
      if (region.mask.test(q) || !roi.test(q)) continue;
      if (similarity(pd, data[q]) > t_h) continue;
      region.mask.set(q);
      queue.push_back(q);
    }
  }

  region.pixel_count = queue.size();
  region.mean_depth = depth_sum / static_cast<double>(queue.size());
  region.bbox = Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  return region;
}

std::vector<GrownRegion> segment_objects(const DepthFrame& frame, const PixelMask& roi,
                                         const DepthHistogram& hist,
                                         const GrowthParams& params) {
  params.validate();
  std::vector<GrownRegion> regions;
  PixelMask residual = roi;
  std::size_t remaining = residual.popcount();
  for (std::size_t seeds = 0;
       remaining > 0 && remaining >= params.min_region_pixels && seeds < params.max_seeds;
       ++seeds) {
    const Seed seed = find_seed(residual, frame);
    const int t_h = adaptive_threshold(hist, seed.depth);
    GrownRegion region = grow_region(frame, residual, seed, t_h, params);
    residual.subtract(region.mask);
    remaining -= region.pixel_count;
    if (region.pixel_count >= params.min_region_pixels) regions.push_back(std::move(region));
  }
  return regions;
}

}  // namespace depthseg
