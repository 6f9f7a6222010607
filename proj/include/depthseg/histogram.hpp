#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "depthseg/depth_frame.hpp"

namespace depthseg {

class EmptyHistogram : public std::runtime_error {
 public:
  EmptyHistogram() : std::runtime_error("empty histogram: frame has no valid depth") {}
};

/// Sparse histogram of depth: strictly ascending distinct depths and their
/// repetition counts. Zero depths never appear.
struct DepthHistogram {
  std::vector<Depth> values;
  std::vector<std::uint32_t> counts;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  std::uint64_t total() const;

  /// Bin holding `depth`, if any.
  std::optional<std::size_t> index_of(Depth depth) const;

  /// Throws std::invalid_argument if the ascending/positive-count invariants fail.
  void validate() const;
};

/// Histogram over all nonzero pixels. Throws EmptyHistogram on an all-zero frame.
DepthHistogram build_histogram(const DepthFrame& frame);

/// Histogram restricted to the pixels set in `roi`.
DepthHistogram build_histogram(const DepthFrame& frame, const PixelMask& roi);

/// Indices i in the open range (lo_idx, hi_idx) whose count strictly exceeds
/// both neighbours. Sub-range endpoints are never peaks.
std::vector<std::size_t> detect_peaks(std::span<const std::uint32_t> counts,
                                      std::size_t lo_idx, std::size_t hi_idx);
std::vector<std::size_t> detect_peaks(const DepthHistogram& hist, std::size_t lo_idx,
                                      std::size_t hi_idx);

struct SegmentationParams {
  int body_span_mm = 400;              // front-to-back depth extent of a body
  std::size_t min_region_pixels = 200; // smaller ROIs are not grown

  void validate() const;
};

/// Contiguous histogram index range plus the peaks that survived inside it.
struct DepthRegion {
  std::size_t lo_idx = 0;
  std::size_t hi_idx = 0;
  std::vector<std::size_t> peaks;

  friend bool operator==(const DepthRegion&, const DepthRegion&) = default;
};

/// Recursive split-and-reduce over the peaks. The returned ranges are
/// disjoint, ordered and cover [0, n-1].
std::vector<DepthRegion> split_regions(const DepthHistogram& hist,
                                       const SegmentationParams& params);

/// Inclusive depth band in millimeters.
struct DepthInterval {
  Depth lo = 0;
  Depth hi = 0;

  bool contains(Depth d) const { return d >= lo && d <= hi; }
  friend bool operator==(const DepthInterval&, const DepthInterval&) = default;
};

/// Boundary depths are the region's outermost peaks (its range ends when it
/// has none). Each is pushed outward by body_span/2, then pulled back to the
/// lowest-count bin inside that margin; ties go to the bin nearest the
/// original boundary.
DepthInterval widen_and_snap(const DepthHistogram& hist, const DepthRegion& region,
                             const SegmentationParams& params);

/// Nonzero pixels whose depth lies inside `interval`.
PixelMask extract_roi(const DepthFrame& frame, const DepthInterval& interval);

/// Two-column CSV "depth_mm,count" with a header line.
std::string histogram_csv(const DepthHistogram& hist);

}  // namespace depthseg
