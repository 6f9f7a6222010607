#pragma once

#include <cstddef>
#include <vector>

#include "depthseg/depth_frame.hpp"
#include "depthseg/histogram.hpp"

namespace depthseg {

struct Seed {
  int x = 0;
  int y = 0;
  Depth depth = 0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

struct GrowthParams {
  int connectivity = 4;                // 4 or 8
  std::size_t min_region_pixels = 200;
  std::size_t max_seeds = 8;

  void validate() const;
};

struct GrownRegion {
  PixelMask mask;
  Rect bbox;
  std::size_t pixel_count = 0;
  double mean_depth = 0.0;
  Seed seed;
  int threshold_used = 0;  // T_H in mm
};

/// Similarity of two depths: their absolute difference in mm.
constexpr int similarity(Depth a, Depth b) {
  return a > b ? static_cast<int>(a) - b : static_cast<int>(b) - a;
}

/// Densest point of the mask: the intersection of the fullest row and the
/// fullest column (smallest index on ties). When that pixel is outside the
/// mask, the nearest mask pixel by L1 distance is used, ties broken by
/// smallest (y, x). Throws std::invalid_argument on an empty mask.
Seed find_seed(const PixelMask& mask, const DepthFrame& frame);

/// Growth threshold for a seed: the larger gap from the seed's bin to its
/// neighbouring bins (one-sided at the ends), never below 1 mm.
/// Throws std::invalid_argument if seed_depth has no bin.
int adaptive_threshold(const DepthHistogram& hist, Depth seed_depth);

/// Breadth-first growth from `seed` over `roi` pixels. A neighbour q of an
/// accepted pixel p joins when similarity(p, q) <= t_h. Neighbours are visited
/// N, E, S, W, then NE, SE, SW, NW for 8-connectivity.
GrownRegion grow_region(const DepthFrame& frame, const PixelMask& roi, const Seed& seed,
                        int t_h, const GrowthParams& params);

/// Repeats seed -> threshold -> grow -> subtract on the residual ROI until it
/// holds fewer than min_region_pixels or max_seeds seeds were used. Regions
/// under min_region_pixels are dropped. `hist` supplies the thresholds.
std::vector<GrownRegion> segment_objects(const DepthFrame& frame, const PixelMask& roi,
                                         const DepthHistogram& hist,
                                         const GrowthParams& params);

}  // namespace depthseg
