#include "depthseg/scene_synth.hpp"

#include <algorithm>
#include <random>

namespace depthseg {
namespace {

constexpr std::int32_t kNoOwner = -2;
constexpr std::int32_t kBackground = -1;

struct Placement {
  Rect bbox;
  int depth = 0;
  bool visible = true;
};

struct Raster {
  DepthFrame frame;
  std::vector<std::int32_t> owner;
  std::vector<std::int32_t> nominal;
};

std::vector<int> jitter_field(std::uint64_t seed, std::uint32_t stream, std::size_t n, int amp) {
  std::vector<int> field(n, 0);
  if (amp <= 0) return field;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> dist(-amp, amp);
  for (auto& v : field) v = dist(rng);
  return field;
}

Depth to_depth(long long v, int step) {
  if (step > 1) {
    v = ((v + step / 2) / step) * step;
    if (v > 65535) v = (65535 / step) * step;
  }
  return static_cast<Depth>(std::clamp<long long>(v, 1, 65535));
}

bool inside_shape(BlobSpec::Shape shape, const Rect& box, int lx, int ly) {
  if (shape == BlobSpec::Shape::kRectangle) return true;
  const double rx = box.w / 2.0;
  const double ry = box.h / 2.0;
  const double nx = (lx + 0.5 - rx) / rx;
  const double ny = (ly + 0.5 - ry) / ry;
  return nx * nx + ny * ny <= 1.0;
}

void check_depth(long long d, const std::string& what) {
  if (d < 1 || d > 65535) throw SpecError(what + " depth " + std::to_string(d) + " outside (0, 65535]");
}

void check_box(const Rect& box, const SceneSpec& spec, const std::string& what) {
  if (box.w < 1 || box.h < 1 || box.x < 0 || box.y < 0 || box.right() > spec.width ||
      box.bottom() > spec.height) {
    throw SpecError(what + " bbox outside the scene");
  }
}

Raster render(const SceneSpec& spec, const std::vector<Placement>& placements) {
  Raster r{DepthFrame(spec.width, spec.height), {}, {}};
  const std::size_t n = r.frame.size();
  r.owner.assign(n, kNoOwner);
  r.nominal.assign(n, 0);
  auto data = r.frame.data();

  if (spec.background) {
    const auto jit = jitter_field(spec.rng_seed, 0, n, spec.background_jitter);
    for (std::size_t i = 0; i < n; ++i) {
      data[i] = to_depth(static_cast<long long>(*spec.background) + jit[i], spec.depth_step);
      r.owner[i] = kBackground;
      r.nominal[i] = *spec.background;
    }
  }
  if (spec.ramp) {
    const RampSpec& ramp = *spec.ramp;
    for (int y = std::max(ramp.start_row, 0); y < spec.height; ++y) {
      const long long d =
          static_cast<long long>(ramp.start_depth) + static_cast<long long>(ramp.mm_per_row) * (y - ramp.start_row);
      for (int x = 0; x < spec.width; ++x) {
        const std::size_t i = r.frame.index(x, y);
        if (d < 1) {
          data[i] = 0;
          r.owner[i] = kNoOwner;
          r.nominal[i] = 0;
        } else {
          data[i] = to_depth(d, spec.depth_step);
          r.owner[i] = kBackground;
          r.nominal[i] = static_cast<std::int32_t>(std::min<long long>(d, 65535));
        }
      }
    }
  }
  for (std::size_t b = 0; b < spec.blobs.size(); ++b) {
    const BlobSpec& blob = spec.blobs[b];
    const Placement& p = placements[b];
    if (!p.visible) continue;
    const auto jit = jitter_field(spec.rng_seed, static_cast<std::uint32_t>(b + 1),
                                  static_cast<std::size_t>(p.bbox.area()), blob.jitter);
    for (int ly = 0; ly < p.bbox.h; ++ly) {
      for (int lx = 0; lx < p.bbox.w; ++lx) {
        if (!inside_shape(blob.shape, p.bbox, lx, ly)) continue;
        const std::size_t i = r.frame.index(p.bbox.x + lx, p.bbox.y + ly);
        const int j = jit[static_cast<std::size_t>(ly) * p.bbox.w + lx];
        data[i] = to_depth(static_cast<long long>(p.depth) + j, spec.depth_step);
        r.owner[i] = static_cast<std::int32_t>(b);
        r.nominal[i] = p.depth;
      }
    }
  }
  return r;
}

std::vector<Placement> base_placements(const SceneSpec& spec) {
  std::vector<Placement> out;
  for (const auto& b : spec.blobs) out.push_back({b.bbox, b.depth, true});
  return out;
}

void fill_counts(const Raster& r, std::size_t blob_count, std::vector<std::size_t>& counts,
                 std::size_t* background, std::vector<PixelMask>* masks) {
  counts.assign(blob_count, 0);
  if (masks) masks->assign(blob_count, PixelMask(r.frame.width(), r.frame.height()));
  if (background) *background = 0;
  const auto data = r.frame.data();
  for (std::size_t i = 0; i < r.owner.size(); ++i) {
    const auto o = r.owner[i];
    if (o >= 0) {
      ++counts[static_cast<std::size_t>(o)];
      if (masks) (*masks)[static_cast<std::size_t>(o)].set(i);
    } else if (o == kBackground && background && data[i] != 0) {
      ++*background;
    }
  }
}

}  // namespace

void SceneSpec::validate() const {
  if (width < 1 || height < 1) throw SpecError("scene dimensions must be positive");
  if (depth_step < 1) throw SpecError("depth_step must be >= 1");
  if (background_jitter < 0) throw SpecError("background jitter must be >= 0");
  if (background) check_depth(*background, "background");
  if (ramp && ramp->start_depth < 1) throw SpecError("ramp start depth must be positive");
  for (std::size_t b = 0; b < blobs.size(); ++b) {
    const std::string name = "blob " + std::to_string(b);
    check_box(blobs[b].bbox, *this, name);
    check_depth(blobs[b].depth, name);
    if (blobs[b].jitter < 0) throw SpecError(name + " jitter must be >= 0");
  }
}

Scene gen_scene(const SceneSpec& spec) {
  spec.validate();
  Raster r = render(spec, base_placements(spec));
  Scene s;
  fill_counts(r, spec.blobs.size(), s.oracle.blob_counts, &s.oracle.background_count,
              &s.oracle.blob_masks);
  s.frame = std::move(r.frame);
  return s;
}

void SequenceSpec::validate() const {
  base.validate();
  if (frame_count < 1) throw SpecError("frame_count must be >= 1");
  for (const auto& m : motions) {
    if (m.blob >= base.blobs.size()) throw SpecError("motion references a missing blob");
    if (m.duration < 0) throw SpecError("motion duration must be >= 0");
  }
}

struct SequenceRenderer::Layout {
  std::vector<Placement> placements;
};

SequenceRenderer::Layout SequenceRenderer::layout(int t) const {
  Layout l{base_placements(spec_.base)};
  std::vector<int> transient_active(l.placements.size(), -1);  // -1: no transient motion
  for (const auto& m : spec_.motions) {
    const int steps = std::clamp(t - m.onset + 1, 0, m.duration);
    const bool active = t >= m.onset && t < m.onset + m.duration;
    Placement& p = l.placements[m.blob];
    p.bbox.x += m.dx * steps;
    p.bbox.y += m.dy * steps;
    p.bbox.w += m.dw * steps;
    p.bbox.h += m.dh * steps;
    p.depth += m.ddepth * steps;
    if (m.transient) {
      auto& ta = transient_active[m.blob];
      ta = std::max(ta, active ? 1 : 0);
    }
  }
  for (std::size_t b = 0; b < l.placements.size(); ++b) {
    if (transient_active[b] == 0) l.placements[b].visible = false;
  }
  return l;
}

SequenceRenderer::SequenceRenderer(SequenceSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  for (int t = 0; t < spec_.frame_count; ++t) {
    const Layout l = layout(t);
    for (std::size_t b = 0; b < l.placements.size(); ++b) {
      const auto& p = l.placements[b];
      if (!p.visible) continue;
      const std::string name = "blob " + std::to_string(b) + " at frame " + std::to_string(t);
      check_box(p.bbox, spec_.base, name);
      check_depth(p.depth, name);
    }
  }
  Raster r0 = render(spec_.base, layout(0).placements);
  owner0_ = std::move(r0.owner);
  nominal0_ = std::move(r0.nominal);
}

DepthFrame SequenceRenderer::frame(int t) const {
  if (t < 0 || t >= spec_.frame_count) throw std::out_of_range("frame index outside sequence");
  return render(spec_.base, layout(t).placements).frame;
}

SequenceFrameOracle SequenceRenderer::oracle(int t) const {
  if (t < 0 || t >= spec_.frame_count) throw std::out_of_range("frame index outside sequence");
  const Layout l = layout(t);
  const Raster r = render(spec_.base, l.placements);
  SequenceFrameOracle o;
  o.changed = PixelMask(spec_.base.width, spec_.base.height);
  o.blob_changed.assign(spec_.base.blobs.size(), 0);
  for (std::size_t i = 0; i < r.owner.size(); ++i) {
    if (r.owner[i] == owner0_[i] && r.nominal[i] == nominal0_[i]) continue;
    o.changed.set(i);
    ++o.changed_count;
    if (r.owner[i] >= 0) ++o.blob_changed[static_cast<std::size_t>(r.owner[i])];
    if (owner0_[i] >= 0 && owner0_[i] != r.owner[i]) {
      ++o.blob_changed[static_cast<std::size_t>(owner0_[i])];
    }
  }
  fill_counts(r, spec_.base.blobs.size(), o.blob_counts, nullptr, nullptr);
  for (const auto& p : l.placements) {
    o.blob_boxes.push_back(p.bbox);
    o.blob_visible.push_back(p.visible);
  }
  return o;
}

Sequence gen_sequence(const SequenceSpec& spec) {
  const SequenceRenderer renderer(spec);
  Sequence s;
  for (int t = 0; t < renderer.frame_count(); ++t) {
    s.frames.push_back(renderer.frame(t));
    s.oracle.push_back(renderer.oracle(t));
  }
  return s;
}

}  // namespace depthseg
