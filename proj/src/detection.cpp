#include "depthseg/detection.hpp"

namespace depthseg {

void DetectorConfig::validate() const {
  if (!(min_aspect > 0.0 && min_aspect <= max_aspect)) {
    throw std::invalid_argument("aspect bounds must satisfy 0 < min <= max");
  }
  if (!(min_area_frac > 0.0 && min_area_frac <= max_area_frac && max_area_frac <= 1.0)) {
    throw std::invalid_argument("area bounds must satisfy 0 < min <= max <= 1");
  }
}

std::vector<BodyCandidate> classify_regions(const std::vector<GrownRegion>& regions,
                                            const DetectorConfig& cfg, int frame_width,
                                            int frame_height) {
  cfg.validate();
  const double frame_pixels = static_cast<double>(frame_width) * frame_height;
  std::vector<BodyCandidate> out;
  out.reserve(regions.size());
  for (const auto& r : regions) {
    BodyCandidate c;
    c.region = r;
    c.aspect = r.bbox.w > 0 ? static_cast<double>(r.bbox.h) / r.bbox.w : 0.0;
    c.area_frac = static_cast<double>(r.pixel_count) / frame_pixels;
    c.is_human = c.aspect >= cfg.min_aspect && c.aspect <= cfg.max_aspect &&
                 c.area_frac >= cfg.min_area_frac && c.area_frac <= cfg.max_area_frac;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<GrownRegion> FrameSegmentation::objects() const {
  std::vector<GrownRegion> all;
  for (const auto& roi : rois) all.insert(all.end(), roi.objects.begin(), roi.objects.end());
  return all;
}

FrameSegmentation segment_frame(const DepthFrame& frame, const SegmentationParams& seg,
                                const GrowthParams& growth) {
  FrameSegmentation out;
  out.histogram = build_histogram(frame);
  for (auto& region : split_regions(out.histogram, seg)) {
    RoiSegmentation roi_seg;
    roi_seg.interval = widen_and_snap(out.histogram, region, seg);
    roi_seg.region = std::move(region);
    const PixelMask roi = extract_roi(frame, roi_seg.interval);
    roi_seg.roi_pixels = roi.popcount();
    if (roi_seg.roi_pixels > 0 && roi_seg.roi_pixels >= seg.min_region_pixels) {
      roi_seg.objects = segment_objects(frame, roi, build_histogram(frame, roi), growth);
    }
    out.rois.push_back(std::move(roi_seg));
  }
  return out;
}

DriverSearch search_driver(const DepthFrame& frame, const SegmentationParams& seg,
                           const GrowthParams& growth, const DetectorConfig& cfg) {
  cfg.validate();
  DriverSearch s;
  s.segmentation = segment_frame(frame, seg, growth);
  s.candidates = classify_regions(s.segmentation.objects(), cfg, frame.width(), frame.height());
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    if (!s.candidates[i].is_human) continue;
    if (!s.driver ||
        s.candidates[i].region.pixel_count > s.candidates[*s.driver].region.pixel_count) {
      s.driver = i;
    }
  }
  return s;
}

BodyCandidate locate_driver(const DepthFrame& frame, const SegmentationParams& seg,
                            const GrowthParams& growth, const DetectorConfig& cfg) {
  DriverSearch s = search_driver(frame, seg, growth, cfg);
  if (!s.driver) throw NoDriverFound();
  return std::move(s.candidates[*s.driver]);
}

}  // namespace depthseg
