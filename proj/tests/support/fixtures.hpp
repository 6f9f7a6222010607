// Scene builders and brute-force oracles shared by the test binaries. Nothing
// here calls into the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthseg/depth_frame.hpp"
#include "depthseg/json_io.hpp"
#include "depthseg/scene_synth.hpp"

namespace depthseg::testkit {

inline std::string data_path(const std::string& rel) { return std::string(DEPTHSEG_DATA_DIR) + "/" + rel; }

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

inline SceneSpec bundled_scene(const std::string& name) {
  return scene_spec_from_json(read_json(data_path("specs/" + name + ".json")));
}

inline SequenceSpec bundled_sequence(const std::string& name) {
  return sequence_spec_from_json(read_json(data_path("specs/" + name + ".json")));
}

inline BlobSpec rect_blob(int x, int y, int w, int h, int depth, int jitter = 0) {
  return BlobSpec{BlobSpec::Shape::kRectangle, Rect{x, y, w, h}, depth, jitter};
}

/// Two side-by-side planes filling the frame (left half / right half).
inline SceneSpec two_plane_scene(int near_mm, int far_mm, int jitter, std::uint64_t seed) {
  SceneSpec s;
  s.width = 320;
  s.height = 240;
  s.rng_seed = seed;
  s.blobs = {rect_blob(0, 0, 160, 240, near_mm, jitter), rect_blob(160, 0, 160, 240, far_mm, jitter)};
  return s;
}

/// Union of several oracle blob masks (a person drawn as torso + head).
inline PixelMask mask_union(const std::vector<PixelMask>& masks, std::initializer_list<int> ids) {
  PixelMask out(masks.front().width(), masks.front().height());
  for (int id : ids) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (masks[static_cast<std::size_t>(id)].test(i)) out.set(i);
    }
  }
  return out;
}

inline Rect box_union(const Rect& a, const Rect& b) {
  const int x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.right(), b.right()), y1 = std::max(a.bottom(), b.bottom());
  return Rect{x0, y0, x1 - x0, y1 - y0};
}

/// Strict local maxima by direct definition over (lo, hi).
inline std::vector<std::size_t> brute_force_peaks(const std::vector<std::uint32_t>& y,
                                                  std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool interior = i > lo && i < hi;
    if (interior && y[i] > y[i - 1] && y[i] > y[i + 1]) out.push_back(i);
  }
  return out;
}

/// Flood fill with an explicit stack: the set reachable from (sx, sy) through
/// in-mask neighbours whose depth differs by at most t_h.
inline PixelMask oracle_flood(const DepthFrame& f, const PixelMask& roi, int sx, int sy, int t_h,
                              int connectivity) {
  PixelMask out(f.width(), f.height());
  std::vector<std::pair<int, int>> stack{{sx, sy}};
  out.set(sx, sy);
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0)) continue;
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= f.width() || ny >= f.height()) continue;
        if (out.test(nx, ny) || !roi.test(nx, ny)) continue;
        if (std::abs(int(f.at(x, y)) - int(f.at(nx, ny))) > t_h) continue;
        out.set(nx, ny);
        stack.push_back({nx, ny});
      }
    }
  }
  return out;
}

/// Number of connected components of a mask (unconstrained by depth), by BFS.
inline int oracle_component_count(const PixelMask& m, int connectivity) {
  PixelMask seen(m.width(), m.height());
  int count = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.test(x, y) || seen.test(x, y)) continue;
      ++count;
      std::vector<std::pair<int, int>> q{{x, y}};
      seen.set(x, y);
      for (std::size_t h = 0; h < q.size(); ++h) {
        auto [cx, cy] = q[h];
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0)) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= m.width() || ny >= m.height()) continue;
            if (!m.test(nx, ny) || seen.test(nx, ny)) continue;
            seen.set(nx, ny);
            q.push_back({nx, ny});
          }
        }
      }
    }
  }
  return count;
}

/// BFS labeling of a 0/1 grid, labels 1.. in raster order of first appearance.
inline std::vector<int> oracle_labels(const std::vector<std::uint8_t>& on, int w, int h,
                                      int connectivity) {
  std::vector<int> lab(on.size(), 0);
  int next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!on[i] || lab[i]) continue;
      lab[i] = ++next;
      std::vector<std::pair<int, int>> q{{x, y}};
      for (std::size_t k = 0; k < q.size(); ++k) {
        auto [cx, cy] = q[k];
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0)) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (!on[j] || lab[j]) continue;
            lab[j] = next;
            q.push_back({nx, ny});
          }
        }
      }
    }
  }
  return lab;
}

/// Random depth frame with a fraction of zero pixels.
inline DepthFrame random_frame(std::mt19937& rng, int w, int h, int lo, int hi, double zero_frac) {
  DepthFrame f(w, h);
  std::uniform_int_distribution<int> d(lo, hi);
  std::bernoulli_distribution z(zero_frac);
  for (auto& v : f.data()) v = z(rng) ? 0 : static_cast<Depth>(d(rng));
  return f;
}

}  // namespace depthseg::testkit
