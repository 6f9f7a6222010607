#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "depthseg/detection.hpp"
#include "depthseg/histogram.hpp"
#include "depthseg/motion_tracking.hpp"
#include "depthseg/region_growing.hpp"

namespace depthseg {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error("config: " + what) {}
};

struct PipelineConfig {
  SegmentationParams seg;
  GrowthParams growth;
  DetectorConfig detector;
  TrackerConfig tracker;
  std::string out_dir;
  bool dump_gray = false;
  bool dump_masks = false;

  void validate() const;
};

/// Flat JSON document, one key per field. The snapshot written into reports
/// uses the same keys, so it can be fed back as a config file.
nlohmann::json to_json(const PipelineConfig& cfg);

/// Overlays the keys present in `doc` onto `base`. Unknown keys and wrong
/// types raise ConfigError.
PipelineConfig apply_config(const nlohmann::json& doc, PipelineConfig base = {});

PipelineConfig load_config(const std::string& path, PipelineConfig base = {});

}  // namespace depthseg
