#include "depthseg/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace depthseg {
namespace {

template <typename T>
std::function<void(PipelineConfig&, const nlohmann::json&)> setter(T PipelineConfig::*group,
                                                                    auto T::*field) {
  return [group, field](PipelineConfig& c, const nlohmann::json& v) {
    using V = std::remove_reference_t<decltype(c.*group.*field)>;
    (c.*group).*field = v.get<V>();
  };
}

template <typename V>
std::function<void(PipelineConfig&, const nlohmann::json&)> top(V PipelineConfig::*field) {
  return [field](PipelineConfig& c, const nlohmann::json& v) { c.*field = v.get<V>(); };
}

const std::map<std::string, std::function<void(PipelineConfig&, const nlohmann::json&)>>&
setters() {
  static const std::map<std::string, std::function<void(PipelineConfig&, const nlohmann::json&)>>
      table = {
          {"t_mm", setter(&PipelineConfig::seg, &SegmentationParams::body_span_mm)},
          {"min_roi_pixels", setter(&PipelineConfig::seg, &SegmentationParams::min_region_pixels)},
          {"connectivity", setter(&PipelineConfig::growth, &GrowthParams::connectivity)},
          {"min_region_pixels", setter(&PipelineConfig::growth, &GrowthParams::min_region_pixels)},
          {"max_seeds", setter(&PipelineConfig::growth, &GrowthParams::max_seeds)},
          {"min_aspect", setter(&PipelineConfig::detector, &DetectorConfig::min_aspect)},
          {"max_aspect", setter(&PipelineConfig::detector, &DetectorConfig::max_aspect)},
          {"min_area_frac", setter(&PipelineConfig::detector, &DetectorConfig::min_area_frac)},
          {"max_area_frac", setter(&PipelineConfig::detector, &DetectorConfig::max_area_frac)},
          {"epsilon_mm", setter(&PipelineConfig::tracker, &TrackerConfig::diff_epsilon_mm)},
          {"grid_cell", setter(&PipelineConfig::tracker, &TrackerConfig::grid_cell)},
          {"alert_pct", setter(&PipelineConfig::tracker, &TrackerConfig::area_alert_pct)},
          {"persistence", setter(&PipelineConfig::tracker, &TrackerConfig::persistence)},
          {"gray_clamp_mm", setter(&PipelineConfig::tracker, &TrackerConfig::gray_clamp_mm)},
          {"grid_connectivity", setter(&PipelineConfig::tracker, &TrackerConfig::grid_connectivity)},
          {"out", top(&PipelineConfig::out_dir)},
          {"dump_gray", top(&PipelineConfig::dump_gray)},
          {"dump_masks", top(&PipelineConfig::dump_masks)},
      };
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  try {
    seg.validate();
    growth.validate();
    detector.validate();
    tracker.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json to_json(const PipelineConfig& c) {
  return nlohmann::json{
      {"t_mm", c.seg.body_span_mm},
      {"min_roi_pixels", c.seg.min_region_pixels},
      {"connectivity", c.growth.connectivity},
      {"min_region_pixels", c.growth.min_region_pixels},
      {"max_seeds", c.growth.max_seeds},
      {"min_aspect", c.detector.min_aspect},
      {"max_aspect", c.detector.max_aspect},
      {"min_area_frac", c.detector.min_area_frac},
      {"max_area_frac", c.detector.max_area_frac},
      {"epsilon_mm", c.tracker.diff_epsilon_mm},
      {"grid_cell", c.tracker.grid_cell},
      {"alert_pct", c.tracker.area_alert_pct},
      {"persistence", c.tracker.persistence},
      {"gray_clamp_mm", c.tracker.gray_clamp_mm},
      {"grid_connectivity", c.tracker.grid_connectivity},
      {"out", c.out_dir},
      {"dump_gray", c.dump_gray},
      {"dump_masks", c.dump_masks},
  };
}

PipelineConfig apply_config(const nlohmann::json& doc, PipelineConfig base) {
  if (!doc.is_object()) throw ConfigError("top level must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
    try {
      it->second(base, value);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }
  return base;
}

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return apply_config(doc, std::move(base));
}

}  // namespace depthseg
