#include "depthseg/motion_tracking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace depthseg {
namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (a < b) {
    parent[b] = a;
  } else {
    parent[a] = b;
  }
}

// Visits the full-resolution pixels of grid cell (cx, cy).
template <typename Fn>
void for_each_cell_pixel(const DiffImage& diff, int cell, int cx, int cy, Fn&& fn) {
  const int x_end = std::min(diff.width, (cx + 1) * cell);
  const int y_end = std::min(diff.height, (cy + 1) * cell);
  for (int y = cy * cell; y < y_end; ++y) {
    for (int x = cx * cell; x < x_end; ++x) fn(x, y, diff.index(x, y));
  }
}

int round_ratio(long long num, long long den) { return static_cast<int>((2 * num + den) / (2 * den)); }

}  // namespace

void TrackerConfig::validate() const {
  if (diff_epsilon_mm <= 0 || grid_cell <= 0 || !(area_alert_pct > 0.0) || persistence <= 0 ||
      gray_clamp_mm <= 0) {
    throw std::invalid_argument("tracker parameters must be positive");
  }
  if (gray_clamp_mm <= diff_epsilon_mm) {
    throw std::invalid_argument("gray clamp must exceed the change epsilon");
  }
  if (grid_connectivity != 4 && grid_connectivity != 8) {
    throw std::invalid_argument("grid connectivity must be 4 or 8");
  }
}

ReferenceFrame set_reference(const DepthFrame& frame, const BodyCandidate& driver) {
  if (!driver.is_human) throw std::invalid_argument("reference driver is not an accepted human");
  const Rect& box = driver.region.bbox;
  if (box.w < 1 || box.h < 1) throw std::invalid_argument("degenerate driver bounding box");
  if (driver.region.mask.width() != frame.width() ||
      driver.region.mask.height() != frame.height()) {
    throw std::invalid_argument("driver mask does not match frame");
  }
  check_rect_within(box, frame.width(), frame.height());
  ReferenceFrame ref;
  ref.window = box;
  ref.depth = crop(frame, box);
  ref.driver_mask = crop(driver.region.mask, box);
  ref.a_r = ref.driver_mask.popcount();
  if (ref.a_r == 0) throw std::invalid_argument("driver mask is empty inside its bounding box");
  return ref;
}

std::size_t DiffImage::changed_count(int epsilon) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < delta.size(); ++i) n += changed(i, epsilon) ? 1 : 0;
  return n;
}

DiffImage subtract(const DepthFrame& current, const ReferenceFrame& ref,
                   const TrackerConfig& cfg) {
  cfg.validate();
  check_rect_within(ref.window, current.width(), current.height());
  DiffImage d;
  d.width = ref.window.w;
  d.height = ref.window.h;
  d.window = ref.window;
  const std::size_t n = static_cast<std::size_t>(d.width) * d.height;
  d.delta.resize(n);
  d.valid.resize(n);
  d.current.resize(n);
  for (int y = 0; y < d.height; ++y) {
    const auto cur_row = current.row(ref.window.y + y).subspan(ref.window.x, d.width);
    const auto ref_row = ref.depth.row(y);
    for (int x = 0; x < d.width; ++x) {
      const std::size_t i = d.index(x, y);
      const Depth c = cur_row[x];
      const Depth r = ref_row[x];
      d.current[i] = c;
      d.delta[i] = static_cast<std::int32_t>(c) - static_cast<std::int32_t>(r);
      d.valid[i] = (c != 0 && r != 0) ? 1 : 0;
    }
  }
  return d;
}

ChangeGrid downsample_max(const DiffImage& diff, const TrackerConfig& cfg) {
  cfg.validate();
  ChangeGrid g;
  g.cell = cfg.grid_cell;
  g.width = (diff.width + g.cell - 1) / g.cell;
  g.height = (diff.height + g.cell - 1) / g.cell;
  g.values.assign(static_cast<std::size_t>(g.width) * g.height, 0);
  for (int y = 0; y < diff.height; ++y) {
    const std::size_t row = static_cast<std::size_t>(y / g.cell) * g.width;
    for (int x = 0; x < diff.width; ++x) {
      const std::size_t i = diff.index(x, y);
      if (!diff.valid[i]) continue;
      auto& cell = g.values[row + static_cast<std::size_t>(x / g.cell)];
      cell = std::max(cell, std::abs(diff.delta[i]));
    }
  }
  g.changed.resize(g.values.size());
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    g.changed[i] = g.values[i] > cfg.diff_epsilon_mm ? 1 : 0;
  }
  return g;
}

std::vector<int> label_cells(const ChangeGrid& grid, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw std::invalid_argument("connectivity must be 4 or 8");
  }
  const int w = grid.width;
  const int h = grid.height;
  std::vector<int> labels(grid.changed.size(), 0);
  std::vector<int> parent{0};
  auto at = [&](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  // First pass: provisional labels from the already-visited neighbours.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!grid.changed[at(x, y)]) continue;
      int label = 0;
      auto consider = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w) return;
        const int l = labels[at(nx, ny)];
        if (!l) return;
        if (!label) {
          label = l;
        } else {
          unite(parent, label, l);
        }
      };
      consider(x - 1, y);
      consider(x, y - 1);
      if (connectivity == 8) {
        consider(x - 1, y - 1);
        consider(x + 1, y - 1);
      }
      if (!label) {
        label = static_cast<int>(parent.size());
        parent.push_back(label);
      }
      labels[at(x, y)] = label;
    }
  }

  // Second pass: resolve to roots, renumber by first appearance.
  std::vector<int> remap(parent.size(), 0);
  int next = 0;
  for (auto& l : labels) {
    if (!l) continue;
    const int root = find_root(parent, l);
    if (!remap[root]) remap[root] = ++next;
    l = remap[root];
  }
  return labels;
}

std::vector<ChangedArea> connected_components(const ChangeGrid& grid, const DiffImage& diff,
                                              const TrackerConfig& cfg) {
  cfg.validate();
  const auto labels = label_cells(grid, cfg.grid_connectivity);
  const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
  std::vector<ChangedArea> areas(static_cast<std::size_t>(count));
  for (auto& a : areas) a.mask = PixelMask(std::max(grid.width, 1), std::max(grid.height, 1));
  std::vector<std::array<int, 4>> extents(areas.size(), {std::numeric_limits<int>::max(),
                                                         std::numeric_limits<int>::max(), -1, -1});

  for (int cy = 0; cy < grid.height; ++cy) {
    for (int cx = 0; cx < grid.width; ++cx) {
      const int l = labels[static_cast<std::size_t>(cy) * grid.width + cx];
      if (!l) continue;
      auto& area = areas[static_cast<std::size_t>(l - 1)];
      auto& ext = extents[static_cast<std::size_t>(l - 1)];
      area.mask.set(cx, cy);
      for_each_cell_pixel(diff, grid.cell, cx, cy, [&](int x, int y, std::size_t i) {
        if (!diff.changed(i, cfg.diff_epsilon_mm)) return;
        ++area.a_c;
        ext[0] = std::min(ext[0], x);
        ext[1] = std::min(ext[1], y);
        ext[2] = std::max(ext[2], x);
        ext[3] = std::max(ext[3], y);
      });
    }
  }

  const std::size_t min_pixels = static_cast<std::size_t>(grid.cell) * grid.cell;
  std::vector<ChangedArea> kept;
  for (std::size_t k = 0; k < areas.size(); ++k) {
    if (areas[k].a_c < min_pixels) continue;
    const auto& e = extents[k];
    areas[k].bbox = Rect{diff.window.x + e[0], diff.window.y + e[1], e[2] - e[0] + 1,
                         e[3] - e[1] + 1};
    kept.push_back(std::move(areas[k]));
  }
  return kept;
}

MotionReport changed_metrics(std::vector<ChangedArea> areas, const ReferenceFrame& ref,
                             const DiffImage& diff, const TrackerConfig& cfg) {
  if (ref.a_r == 0) throw std::invalid_argument("reference has no driver pixels");
  MotionReport report;
  report.changed_pixels = diff.changed_count(cfg.diff_epsilon_mm);
  std::size_t total_c = 0;
  double depth_total = 0.0;
  for (auto& area : areas) {
    double depth_sum = 0.0, delta_sum = 0.0;
    std::size_t n = 0;
    for (int cy = 0; cy < area.mask.height(); ++cy) {
      for (int cx = 0; cx < area.mask.width(); ++cx) {
        if (!area.mask.test(cx, cy)) continue;
        for_each_cell_pixel(diff, cfg.grid_cell, cx, cy, [&](int, int, std::size_t i) {
          if (!diff.changed(i, cfg.diff_epsilon_mm)) return;
          depth_sum += diff.current[i];
          delta_sum += diff.delta[i];
          ++n;
        });
      }
    }
    area.a_c = n;
    area.a_changed_pct = 100.0 * static_cast<double>(n) / static_cast<double>(ref.a_r);
    area.d_changed = n ? depth_sum / static_cast<double>(n) : 0.0;
    area.mean_delta = n ? delta_sum / static_cast<double>(n) : 0.0;
    total_c += n;
    depth_total += depth_sum;
  }
  report.a_changed_total = 100.0 * static_cast<double>(total_c) / static_cast<double>(ref.a_r);
  report.d_changed_mean = total_c ? depth_total / static_cast<double>(total_c) : 0.0;
  report.areas = std::move(areas);
  return report;
}

GrayImage recalibrate_gray(const DiffImage& diff, const TrackerConfig& cfg) {
  cfg.validate();
  const long long eps = cfg.diff_epsilon_mm;
  const long long span = cfg.gray_clamp_mm - eps;
  GrayImage img{diff.width, diff.height, std::vector<std::uint8_t>(diff.delta.size(), 0)};
  for (std::size_t i = 0; i < diff.delta.size(); ++i) {
    if (!diff.valid[i]) continue;
    const long long mag = std::llabs(diff.delta[i]);
    if (mag <= eps) {
      img.pixels[i] = static_cast<std::uint8_t>(round_ratio(100 * mag, eps));
    } else {
      img.pixels[i] =
          static_cast<std::uint8_t>(150 + round_ratio(105 * std::min(mag - eps, span), span));
    }
  }
  return img;
}

AlertDecision evaluate_distraction(std::span<const MotionReport> history,
                                   const TrackerConfig& cfg) {
  AlertDecision d;
  const std::size_t need = static_cast<std::size_t>(cfg.persistence);
  std::size_t run = 0;
  while (run < history.size() &&
         history[history.size() - 1 - run].a_changed_total > cfg.area_alert_pct) {
    ++run;
  }
  if (run < need) return d;
  const std::size_t start = history.size() - run;
  const MotionReport& onset = history[start + need - 1];
  d.alert = true;
  d.run_start_frame = history[start].frame_index;
  d.onset_frame = onset.frame_index;
  d.a_changed = onset.a_changed_total;
  for (const auto& a : onset.areas) {
    d.bboxes.push_back(a.bbox);
    d.d_changed.push_back(a.d_changed);
  }
  return d;
}

MotionTracker::MotionTracker(ReferenceFrame reference, TrackerConfig cfg)
    : ref_(std::move(reference)), cfg_(cfg) {
  cfg_.validate();
  if (ref_.a_r == 0) throw std::invalid_argument("reference has no driver pixels");
}

MotionTracker::Step MotionTracker::step(const DepthFrame& current, std::size_t frame_index) {
  last_diff_ = subtract(current, ref_, cfg_);
  const ChangeGrid grid = downsample_max(last_diff_, cfg_);
  Step out;
  out.report = changed_metrics(connected_components(grid, last_diff_, cfg_), ref_, last_diff_, cfg_);
  out.report.frame_index = frame_index;

  window_.push_back(out.report);
  while (window_.size() > static_cast<std::size_t>(cfg_.persistence)) window_.pop_front();
  const std::vector<MotionReport> recent(window_.begin(), window_.end());
  const AlertDecision decision = evaluate_distraction(recent, cfg_);
  out.report.alert = decision.alert;
  if (decision.alert && !alerting_) out.alert_event = decision;
  alerting_ = decision.alert;
  return out;
}

}  // namespace depthseg
