#include "depthseg/json_io.hpp"

#include <set>
#include <string>

namespace depthseg {
namespace {

using nlohmann::json;

void only_keys(const json& doc, std::initializer_list<const char*> keys, const char* where) {
  if (!doc.is_object()) throw SpecError(std::string(where) + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : doc.items()) {
    if (!allowed.count(k)) throw SpecError(std::string("unknown key '") + k + "' in " + where);
  }
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SpecError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Rect rect_from(const json& v) {
  if (!v.is_array() || v.size() != 4) throw SpecError("bbox must be [x, y, w, h]");
  try {
    return Rect{v[0].get<int>(), v[1].get<int>(), v[2].get<int>(), v[3].get<int>()};
  } catch (const json::exception& e) {
    throw SpecError(std::string("bbox: ") + e.what());
  }
}

}  // namespace

SceneSpec scene_spec_from_json(const json& doc) {
  only_keys(doc,
            {"width", "height", "background", "background_jitter", "depth_step", "ramp", "blobs",
             "rng_seed"},
            "scene");
  SceneSpec s;
  s.width = get_or(doc, "width", s.width);
  s.height = get_or(doc, "height", s.height);
  if (doc.contains("background")) {
    const auto& bg = doc.at("background");
    if (bg.is_null() || (bg.is_string() && bg.get<std::string>() == "none")) {
      s.background.reset();
    } else if (bg.is_number_integer()) {
      s.background = bg.get<int>();
    } else {
      throw SpecError("background must be a depth in mm, null or \"none\"");
    }
  }
  s.background_jitter = get_or(doc, "background_jitter", 0);
  s.depth_step = get_or(doc, "depth_step", 1);
  s.rng_seed = get_or<std::uint64_t>(doc, "rng_seed", 0);
  if (doc.contains("ramp") && !doc.at("ramp").is_null()) {
    const auto& r = doc.at("ramp");
    only_keys(r, {"start_row", "start_depth", "mm_per_row"}, "ramp");
    s.ramp = RampSpec{get_or(r, "start_row", 0), get_or(r, "start_depth", 0),
                      get_or(r, "mm_per_row", 0)};
  }
  for (const auto& b : get_or(doc, "blobs", json::array())) {
    only_keys(b, {"shape", "bbox", "depth", "jitter"}, "blob");
    BlobSpec blob;
    const std::string shape = get_or<std::string>(b, "shape", "rectangle");
    if (shape == "rectangle") {
      blob.shape = BlobSpec::Shape::kRectangle;
    } else if (shape == "ellipse") {
      blob.shape = BlobSpec::Shape::kEllipse;
    } else {
      throw SpecError("unknown blob shape '" + shape + "'");
    }
    if (!b.contains("bbox")) throw SpecError("blob needs a bbox");
    blob.bbox = rect_from(b.at("bbox"));
    blob.depth = get_or(b, "depth", 0);
    blob.jitter = get_or(b, "jitter", 0);
    s.blobs.push_back(blob);
  }
  s.validate();
  return s;
}

SequenceSpec sequence_spec_from_json(const json& doc) {
  only_keys(doc, {"base", "frame_count", "motions"}, "sequence");
  if (!doc.contains("base")) throw SpecError("sequence needs a base scene");
  SequenceSpec s;
  s.base = scene_spec_from_json(doc.at("base"));
  s.frame_count = get_or(doc, "frame_count", 1);
  for (const auto& m : get_or(doc, "motions", json::array())) {
    only_keys(m, {"blob", "onset", "duration", "dx", "dy", "dw", "dh", "ddepth", "transient"},
              "motion");
    MotionSpec ms;
    ms.blob = get_or<std::size_t>(m, "blob", 0);
    ms.onset = get_or(m, "onset", 0);
    ms.duration = get_or(m, "duration", 0);
    ms.dx = get_or(m, "dx", 0);
    ms.dy = get_or(m, "dy", 0);
    ms.dw = get_or(m, "dw", 0);
    ms.dh = get_or(m, "dh", 0);
    ms.ddepth = get_or(m, "ddepth", 0);
    ms.transient = get_or(m, "transient", false);
    s.motions.push_back(ms);
  }
  s.validate();
  return s;
}

bool is_sequence_spec(const json& doc) { return doc.is_object() && doc.contains("base"); }

json to_json(const SceneSpec& s) {
  json blobs = json::array();
  for (const auto& b : s.blobs) {
    blobs.push_back({{"shape", b.shape == BlobSpec::Shape::kRectangle ? "rectangle" : "ellipse"},
                     {"bbox", to_json(b.bbox)},
                     {"depth", b.depth},
                     {"jitter", b.jitter}});
  }
  json doc{{"width", s.width},
           {"height", s.height},
           {"background", s.background ? json(*s.background) : json(nullptr)},
           {"background_jitter", s.background_jitter},
           {"depth_step", s.depth_step},
           {"blobs", blobs},
           {"rng_seed", s.rng_seed}};
  if (s.ramp) {
    doc["ramp"] = {{"start_row", s.ramp->start_row},
                   {"start_depth", s.ramp->start_depth},
                   {"mm_per_row", s.ramp->mm_per_row}};
  }
  return doc;
}

json to_json(const SequenceSpec& s) {
  json motions = json::array();
  for (const auto& m : s.motions) {
    motions.push_back({{"blob", m.blob},
                       {"onset", m.onset},
                       {"duration", m.duration},
                       {"dx", m.dx},
                       {"dy", m.dy},
                       {"dw", m.dw},
                       {"dh", m.dh},
                       {"ddepth", m.ddepth},
                       {"transient", m.transient}});
  }
  return json{{"base", to_json(s.base)}, {"frame_count", s.frame_count}, {"motions", motions}};
}

json to_json(const Rect& r) { return json::array({r.x, r.y, r.w, r.h}); }

json to_json(const DepthInterval& interval) { return json::array({interval.lo, interval.hi}); }

json region_json(const GrownRegion& r) {
  return json{{"bbox", to_json(r.bbox)},
              {"pixel_count", r.pixel_count},
              {"mean_depth", r.mean_depth},
              {"seed", json::array({r.seed.x, r.seed.y, r.seed.depth})},
              {"threshold_used", r.threshold_used}};
}

json candidate_json(const BodyCandidate& c) {
  json j = region_json(c.region);
  j["aspect"] = c.aspect;
  j["area_frac"] = c.area_frac;
  j["is_human"] = c.is_human;
  return j;
}

json to_json(const MotionReport& r) {
  json areas = json::array();
  for (const auto& a : r.areas) {
    areas.push_back({{"bbox", to_json(a.bbox)},
                     {"a_c", a.a_c},
                     {"a_changed", a.a_changed_pct},
                     {"d_changed", a.d_changed},
                     {"mean_delta", a.mean_delta},
                     {"cells", a.mask.popcount()}});
  }
  return json{{"frame_index", r.frame_index},
              {"a_changed_total", r.a_changed_total},
              {"d_changed_mean", r.d_changed_mean},
              {"changed_pixels", r.changed_pixels},
              {"alert", r.alert},
              {"areas", areas}};
}

json to_json(const AlertDecision& a) {
  json boxes = json::array();
  for (const auto& b : a.bboxes) boxes.push_back(to_json(b));
  return json{{"frame_index", a.onset_frame},
              {"run_start_frame", a.run_start_frame},
              {"a_changed", a.a_changed},
              {"bboxes", boxes},
              {"d_changed", a.d_changed}};
}

}  // namespace depthseg
