#include "depthseg/histogram.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace depthseg {
namespace {

constexpr std::size_t kDepthLevels = std::numeric_limits<Depth>::max() + 1;

DepthHistogram from_dense(const std::vector<std::uint32_t>& dense) {
  DepthHistogram h;
  for (std::size_t d = 1; d < dense.size(); ++d) {
    if (dense[d]) {
      h.values.push_back(static_cast<Depth>(d));
      h.counts.push_back(dense[d]);
    }
  }
  if (h.empty()) throw EmptyHistogram();
  return h;
}

std::size_t valley_between(std::span<const std::uint32_t> counts, std::size_t a,
                           std::size_t b) {
  std::size_t best = a + 1;
  for (std::size_t i = a + 2; i < b; ++i) {
    if (counts[i] < counts[best]) best = i;
  }
  return best;
}

void split_range(const DepthHistogram& hist, std::size_t lo, std::size_t hi, int span,
                 std::vector<DepthRegion>& out) {
  auto peaks = detect_peaks(hist, lo, hi);
  const auto depth_at = [&](std::size_t i) { return static_cast<int>(hist.values[i]); };
  if (peaks.size() < 2 || depth_at(peaks.back()) - depth_at(peaks.front()) < span) {
    out.push_back({lo, hi, std::move(peaks)});
    return;
  }
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
    if (depth_at(peaks[i + 1]) - depth_at(peaks[i]) <= span) continue;
    // Cut at the valley. It joins the right part unless it sits right after
    // the left peak, where that would turn the peak into an endpoint.
    const std::size_t v = valley_between(hist.counts, peaks[i], peaks[i + 1]);
    const std::size_t left_end = (v == peaks[i] + 1) ? v : v - 1;
    split_range(hist, lo, left_end, span, out);
    split_range(hist, left_end + 1, hi, span, out);
    return;
  }
  out.push_back({lo, hi, std::move(peaks)});
}

// Peakless ranges join the neighbour whose nearest peak is closest in depth.
void merge_peakless(const DepthHistogram& hist, std::vector<DepthRegion>& regions) {
  constexpr long long kFar = std::numeric_limits<long long>::max();
  for (;;) {
    if (regions.size() < 2) return;
    auto it = std::find_if(regions.begin(), regions.end(),
                           [](const DepthRegion& r) { return r.peaks.empty(); });
    if (it == regions.end()) return;
    const std::size_t j = static_cast<std::size_t>(it - regions.begin());
    long long left_dist = kFar, right_dist = kFar;
    if (j > 0 && !regions[j - 1].peaks.empty()) {
      left_dist = static_cast<long long>(hist.values[regions[j].lo_idx]) -
                  hist.values[regions[j - 1].peaks.back()];
    }
    if (j + 1 < regions.size() && !regions[j + 1].peaks.empty()) {
      right_dist = static_cast<long long>(hist.values[regions[j + 1].peaks.front()]) -
                   hist.values[regions[j].hi_idx];
    }
    bool into_left;
    if (left_dist == kFar && right_dist == kFar) {
      into_left = (j + 1 == regions.size());
    } else {
      into_left = left_dist <= right_dist;
    }
    if (into_left) {
      regions[j - 1].hi_idx = regions[j].hi_idx;
      regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(j));
    } else {
      regions[j + 1].lo_idx = regions[j].lo_idx;
      regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
}

}  // namespace

std::uint64_t DepthHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::optional<std::size_t> DepthHistogram::index_of(Depth depth) const {
  const auto it = std::lower_bound(values.begin(), values.end(), depth);
  if (it == values.end() || *it != depth) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

void DepthHistogram::validate() const {
  if (values.size() != counts.size()) {
    throw std::invalid_argument("histogram values/counts length mismatch");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0) throw std::invalid_argument("histogram holds depth 0");
    if (counts[i] == 0) throw std::invalid_argument("histogram holds a zero count");
    if (i > 0 && values[i] <= values[i - 1]) {
      throw std::invalid_argument("histogram depths not strictly ascending");
    }
  }
}

DepthHistogram build_histogram(const DepthFrame& frame) {
  std::vector<std::uint32_t> dense(kDepthLevels, 0);
  for (Depth v : frame.data()) ++dense[v];
  return from_dense(dense);
}

DepthHistogram build_histogram(const DepthFrame& frame, const PixelMask& roi) {
  if (roi.width() != frame.width() || roi.height() != frame.height()) {
    throw std::invalid_argument("roi dimensions differ from frame");
  }
  std::vector<std::uint32_t> dense(kDepthLevels, 0);
  const auto data = frame.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (roi.test(i)) ++dense[data[i]];
  }
  return from_dense(dense);
}

std::vector<std::size_t> detect_peaks(std::span<const std::uint32_t> counts,
                                      std::size_t lo_idx, std::size_t hi_idx) {
  if (lo_idx > hi_idx || hi_idx >= counts.size()) {
    throw std::out_of_range("peak search range outside histogram");
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = lo_idx + 1; i < hi_idx; ++i) {
    if (counts[i] > counts[i - 1] && counts[i] > counts[i + 1]) peaks.push_back(i);
  }
  return peaks;
}

std::vector<std::size_t> detect_peaks(const DepthHistogram& hist, std::size_t lo_idx,
                                      std::size_t hi_idx) {
  return detect_peaks(std::span<const std::uint32_t>(hist.counts), lo_idx, hi_idx);
}

void SegmentationParams::validate() const {
  if (body_span_mm <= 0) throw std::invalid_argument("body span T must be positive");
}

std::vector<DepthRegion> split_regions(const DepthHistogram& hist,
                                       const SegmentationParams& params) {
  params.validate();
  if (hist.empty()) throw EmptyHistogram();
  std::vector<DepthRegion> regions;
  split_range(hist, 0, hist.size() - 1, params.body_span_mm, regions);
  merge_peakless(hist, regions);
  return regions;
}

DepthInterval widen_and_snap(const DepthHistogram& hist, const DepthRegion& region,
                             const SegmentationParams& params) {
  params.validate();
  if (region.lo_idx > region.hi_idx || region.hi_idx >= hist.size()) {
    throw std::out_of_range("region outside histogram");
  }
  const int half = params.body_span_mm / 2;
  const std::size_t lo_core = region.peaks.empty() ? region.lo_idx : region.peaks.front();
  const std::size_t hi_core = region.peaks.empty() ? region.hi_idx : region.peaks.back();

  std::size_t lo_best = lo_core;
  const int lo_limit = static_cast<int>(hist.values[lo_core]) - half;
  for (std::size_t i = lo_core; i-- > 0 && static_cast<int>(hist.values[i]) >= lo_limit;) {
    if (hist.counts[i] < hist.counts[lo_best]) lo_best = i;
  }
  std::size_t hi_best = hi_core;
  const int hi_limit = static_cast<int>(hist.values[hi_core]) + half;
  for (std::size_t i = hi_core + 1;
       i < hist.size() && static_cast<int>(hist.values[i]) <= hi_limit; ++i) {
    if (hist.counts[i] < hist.counts[hi_best]) hi_best = i;
  }
  return DepthInterval{hist.values[lo_best], hist.values[hi_best]};
}

PixelMask extract_roi(const DepthFrame& frame, const DepthInterval& interval) {
  if (interval.lo > interval.hi) throw std::invalid_argument("interval lo > hi");
  PixelMask mask(frame.width(), frame.height());
  const auto data = frame.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] != 0 && interval.contains(data[i])) mask.set(i);
  }
  return mask;
}

std::string histogram_csv(const DepthHistogram& hist) {
  std::ostringstream os;
  os << "depth_mm,count\n";
  for (std::size_t i = 0; i < hist.size(); ++i) os << hist.values[i] << ',' << hist.counts[i] << '\n';
  return os.str();
}

}  // namespace depthseg
