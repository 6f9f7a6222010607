#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "depthseg/depth_frame.hpp"
#include "depthseg/detection.hpp"
#include "depthseg/pgm_io.hpp"

namespace depthseg {

struct TrackerConfig {
  int diff_epsilon_mm = 50;      // |delta| above this counts as changed
  int grid_cell = 10;            // max-pooling cell edge, pixels
  double area_alert_pct = 10.0;  // A_changed alert level, percent
  int persistence = 5;           // consecutive frames above the level
  int gray_clamp_mm = 1000;      // |delta| mapped to 255
  int grid_connectivity = 8;

  void validate() const;
};

/// Safe-pose snapshot: the driver window cropped out of frame 0.
struct ReferenceFrame {
  Rect window;           // full-frame coordinates
  DepthFrame depth;      // window-sized
  PixelMask driver_mask; // window-sized
  std::size_t a_r = 0;   // driver pixels
};

/// Throws std::invalid_argument unless the driver is an accepted human with
/// a nonempty bbox inside the frame.
ReferenceFrame set_reference(const DepthFrame& frame, const BodyCandidate& driver);

/// current - reference over the window. A pixel is valid when both depths are nonzero.
struct DiffImage {
  int width = 0;
  int height = 0;
  Rect window;
  std::vector<std::int32_t> delta;
  std::vector<std::uint8_t> valid;
  std::vector<Depth> current;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  bool changed(std::size_t i, int epsilon) const {
    return valid[i] && (delta[i] > epsilon || delta[i] < -epsilon);
  }
  std::size_t changed_count(int epsilon) const;
};

/// Throws std::out_of_range when the reference window does not fit `current`.
DiffImage subtract(const DepthFrame& current, const ReferenceFrame& ref, const TrackerConfig& cfg);

/// Max-pooled |delta| on a grid_cell x grid_cell lattice (edge cells may be ragged).
struct ChangeGrid {
  int width = 0;   // cells
  int height = 0;  // cells
  int cell = 1;
  std::vector<std::int32_t> values;
  std::vector<std::uint8_t> changed;
};

ChangeGrid downsample_max(const DiffImage& diff, const TrackerConfig& cfg);

/// Connected-component labels of the changed cells (0 = background, then
/// 1, 2, ... in raster order of first appearance).
std::vector<int> label_cells(const ChangeGrid& grid, int connectivity);

struct ChangedArea {
  PixelMask mask;             // grid resolution
  std::size_t a_c = 0;        // changed pixels at full resolution
  double a_changed_pct = 0.0; // 100 * a_c / a_r
  double d_changed = 0.0;     // mean current depth over the changed pixels
  double mean_delta = 0.0;    // mean signed depth change over the same pixels
  Rect bbox;                  // full-frame coordinates of the changed pixels
};

/// Labels changed cells and drops components with fewer than grid_cell^2
/// changed pixels. Area metrics are left for changed_metrics.
std::vector<ChangedArea> connected_components(const ChangeGrid& grid, const DiffImage& diff,
                                              const TrackerConfig& cfg);

struct MotionReport {
  std::size_t frame_index = 0;
  std::vector<ChangedArea> areas;
  std::size_t changed_pixels = 0;  // before component filtering
  double a_changed_total = 0.0;    // percent
  double d_changed_mean = 0.0;     // count-weighted over areas, 0 without areas
  bool alert = false;
};

/// Fills per-area A_changed / D_changed and the report totals.
MotionReport changed_metrics(std::vector<ChangedArea> areas, const ReferenceFrame& ref,
                             const DiffImage& diff, const TrackerConfig& cfg);

/// Unchanged pixels map to [0, 100], changed ones to [150, 255], invalid to 0.
GrayImage recalibrate_gray(const DiffImage& diff, const TrackerConfig& cfg);

struct AlertDecision {
  bool alert = false;
  std::size_t onset_frame = 0;      // frame where the persistence run completed
  std::size_t run_start_frame = 0;  // first over-threshold frame of that run
  double a_changed = 0.0;
  std::vector<Rect> bboxes;
  std::vector<double> d_changed;
};

/// Alert when the trailing `persistence` reports all exceed area_alert_pct.
AlertDecision evaluate_distraction(std::span<const MotionReport> history,
                                   const TrackerConfig& cfg);

/// One monitoring session. Not thread-safe; drive it from one thread.
class MotionTracker {
 public:
  MotionTracker(ReferenceFrame reference, TrackerConfig cfg);

  struct Step {
    MotionReport report;
    std::optional<AlertDecision> alert_event;  // set on the rising edge only
  };

  Step step(const DepthFrame& current, std::size_t frame_index);

  const ReferenceFrame& reference() const { return ref_; }
  const DiffImage& last_diff() const { return last_diff_; }

 private:
  ReferenceFrame ref_;
  TrackerConfig cfg_;
  std::deque<MotionReport> window_;
  bool alerting_ = false;
  DiffImage last_diff_;
};

}  // namespace depthseg
