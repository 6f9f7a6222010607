#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthseg/config.hpp"

namespace depthseg {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInputError = 2,
  kExitNoDriver = 3,
};

/// Every command returns a run report. Wall-clock numbers live under the
/// top-level "timings" key only; everything else is reproducible.
struct CommandResult {
  nlohmann::json report;
  int exit_code = kExitOk;
};

/// Segments each frame; with cfg.out_dir set, writes one mask PGM per grown
/// region and a histogram CSV per frame.
CommandResult run_segment(const std::vector<std::filesystem::path>& frames,
                          const PipelineConfig& cfg);

/// Locates the driver in each frame. Exit code kExitNoDriver when any frame
/// has none.
CommandResult run_locate_driver(const std::vector<std::filesystem::path>& frames,
                                const PipelineConfig& cfg);

/// Frame 0 is the reference. One NDJSON line per frame (and per alert) goes
/// to `stream`. Throws NoDriverFound when frame 0 has no driver.
CommandResult run_monitor(const std::vector<std::filesystem::path>& frames,
                          const PipelineConfig& cfg, std::ostream& stream);

/// Generates a scene or sequence from a JSON spec into out_dir.
CommandResult run_synth(const std::filesystem::path& spec_path,
                        const std::filesystem::path& out_dir);

/// The .pgm files of a directory sorted by filename, or the given files as-is.
std::vector<std::filesystem::path> expand_frame_inputs(
    const std::vector<std::filesystem::path>& inputs);

/// `report` without its "timings" entry, serialized.
std::string reproducible_dump(const nlohmann::json& report);

}  // namespace depthseg
