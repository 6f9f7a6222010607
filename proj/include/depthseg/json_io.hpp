#pragma once

#include <json.hpp>

#include "depthseg/detection.hpp"
#include "depthseg/motion_tracking.hpp"
#include "depthseg/scene_synth.hpp"

namespace depthseg {

// Scene and sequence specs. Parsing throws SpecError on unknown keys or bad values.
SceneSpec scene_spec_from_json(const nlohmann::json& doc);
SequenceSpec sequence_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SceneSpec& spec);
nlohmann::json to_json(const SequenceSpec& spec);

/// True when the document describes a sequence (has "base").
bool is_sequence_spec(const nlohmann::json& doc);

nlohmann::json to_json(const Rect& r);
nlohmann::json to_json(const DepthInterval& interval);
nlohmann::json region_json(const GrownRegion& region);
nlohmann::json candidate_json(const BodyCandidate& candidate);
nlohmann::json to_json(const MotionReport& report);
nlohmann::json to_json(const AlertDecision& alert);

}  // namespace depthseg
