#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "depthseg/depth_frame.hpp"

namespace depthseg {

class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error("invalid spec: " + what) {}
};

struct BlobSpec {
  enum class Shape { kRectangle, kEllipse };
  Shape shape = Shape::kRectangle;
  Rect bbox;
  int depth = 0;   // mm
  int jitter = 0;  // uniform integer noise in [-jitter, +jitter] mm
};

/// Floor-like plane: rows from start_row down get start_depth + mm_per_row * (row - start_row).
struct RampSpec {
  int start_row = 0;
  int start_depth = 0;
  int mm_per_row = 0;
};

struct SceneSpec {
  int width = 640;
  int height = 480;
  std::optional<int> background;  // plane depth, or none (zeros)
  int background_jitter = 0;
  /// Sensor depth-layer spacing; rendered depths are rounded to multiples of it.
  int depth_step = 1;
  std::optional<RampSpec> ramp;
  std::vector<BlobSpec> blobs;  // later blobs occlude earlier ones
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct SceneOracle {
  std::vector<PixelMask> blob_masks;  // visible pixels after occlusion
  std::vector<std::size_t> blob_counts;
  std::size_t background_count = 0;   // visible nonzero background/ramp pixels
};

struct Scene {
  DepthFrame frame;
  SceneOracle oracle;
};

/// Deterministic for a given spec (including rng_seed). Throws SpecError.
Scene gen_scene(const SceneSpec& spec);

/// Per-frame change applied to one blob while the motion is active.
struct MotionSpec {
  std::size_t blob = 0;
  int onset = 0;     // first active frame
  int duration = 0;  // active frames
  int dx = 0;
  int dy = 0;
  int dw = 0;
  int dh = 0;
  int ddepth = 0;
  /// Blob only exists while the motion is active (a reaching arm, say).
  bool transient = false;
};

struct SequenceSpec {
  SceneSpec base;
  int frame_count = 1;
  std::vector<MotionSpec> motions;

  void validate() const;
};

struct SequenceFrameOracle {
  PixelMask changed;  // pixels whose owner or nominal depth differs from frame 0
  std::size_t changed_count = 0;
  std::vector<std::size_t> blob_changed;  // changed pixels owned by blob i now or in frame 0
  std::vector<std::size_t> blob_counts;   // visible pixels per blob
  std::vector<Rect> blob_boxes;           // current bbox per blob
  std::vector<bool> blob_visible;
};

/// Renders sequence frames on demand.
class SequenceRenderer {
 public:
  /// Validates the spec, including every frame's geometry. Throws SpecError.
  explicit SequenceRenderer(SequenceSpec spec);

  int frame_count() const { return spec_.frame_count; }
  const SequenceSpec& spec() const { return spec_; }

  DepthFrame frame(int t) const;
  SequenceFrameOracle oracle(int t) const;

 private:
  struct Layout;
  Layout layout(int t) const;

  SequenceSpec spec_;
  std::vector<std::int32_t> owner0_;
  std::vector<std::int32_t> nominal0_;
};

struct Sequence {
  std::vector<DepthFrame> frames;
  std::vector<SequenceFrameOracle> oracle;
};

Sequence gen_sequence(const SequenceSpec& spec);

}  // namespace depthseg
