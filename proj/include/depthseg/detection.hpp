#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "depthseg/depth_frame.hpp"
#include "depthseg/histogram.hpp"
#include "depthseg/region_growing.hpp"

namespace depthseg {

class NoDriverFound : public std::runtime_error {
 public:
  NoDriverFound() : std::runtime_error("no driver found") {}
};

/// Bounding-box gates for a human body. aspect = bbox height / width,
/// area_frac = region pixels / frame pixels.
struct DetectorConfig {
  double min_aspect = 1.0;
  double max_aspect = 4.0;
  double min_area_frac = 0.05;
  double max_area_frac = 0.60;

  void validate() const;
};

struct BodyCandidate {
  GrownRegion region;
  double aspect = 0.0;
  double area_frac = 0.0;
  bool is_human = false;
};

/// Features and verdict for every region, in input order.
std::vector<BodyCandidate> classify_regions(const std::vector<GrownRegion>& regions,
                                            const DetectorConfig& cfg, int frame_width,
                                            int frame_height);

/// One depth band of a segmented frame and the objects grown inside it.
struct RoiSegmentation {
  DepthRegion region;
  DepthInterval interval;
  std::size_t roi_pixels = 0;
  std::vector<GrownRegion> objects;  // empty when roi_pixels < min_region_pixels
};

struct FrameSegmentation {
  DepthHistogram histogram;
  std::vector<RoiSegmentation> rois;

  /// Every grown object, ROI by ROI in extraction order.
  std::vector<GrownRegion> objects() const;
};

/// histogram -> split -> widen/snap -> ROI -> segment_objects for each band.
/// Throws EmptyHistogram on an all-zero frame.
FrameSegmentation segment_frame(const DepthFrame& frame, const SegmentationParams& seg,
                                const GrowthParams& growth);

struct DriverSearch {
  FrameSegmentation segmentation;
  std::vector<BodyCandidate> candidates;
  std::optional<std::size_t> driver;  // index into candidates
};

/// Segments and classifies without throwing when nothing qualifies.
DriverSearch search_driver(const DepthFrame& frame, const SegmentationParams& seg,
                           const GrowthParams& growth, const DetectorConfig& cfg);

/// The accepted candidate with the most pixels (earliest on ties).
/// Throws NoDriverFound when none is accepted, EmptyHistogram on an all-zero frame.
BodyCandidate locate_driver(const DepthFrame& frame, const SegmentationParams& seg,
                            const GrowthParams& growth, const DetectorConfig& cfg);

}  // namespace depthseg
