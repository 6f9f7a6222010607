// depthseg: depth-frame segmentation, driver location and distraction monitoring.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depthseg/app.hpp"
#include "depthseg/detection.hpp"
#include "depthseg/histogram.hpp"
#include "depthseg/pgm_io.hpp"
#include "depthseg/scene_synth.hpp"

namespace fs = std::filesystem;
using namespace depthseg;

namespace {

struct Overrides {
  std::string config_path;
  std::string out_dir;
  bool dump_gray = false;
  bool dump_masks = false;
  std::optional<int> t_mm;
  std::optional<int> epsilon_mm;
  std::optional<int> grid_cell;
  std::optional<double> alert_pct;
  std::optional<int> persistence;
};

void add_pipeline_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Flat JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir, "Output directory for reports and images");
  cmd->add_flag("--dump-gray", o.dump_gray, "Write recalibrated difference images (monitor)");
  cmd->add_flag("--dump-masks", o.dump_masks, "Write driver mask PGMs");
  cmd->add_option("--t-mm", o.t_mm, "Body depth span T in mm");
  cmd->add_option("--epsilon-mm", o.epsilon_mm, "Change threshold in mm");
  cmd->add_option("--grid-cell", o.grid_cell, "Max-pooling cell size in pixels");
  cmd->add_option("--alert-pct", o.alert_pct, "A_changed alert level in percent");
  cmd->add_option("--persistence", o.persistence, "Consecutive frames before an alert");
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.dump_gray) cfg.dump_gray = true;
  if (o.dump_masks) cfg.dump_masks = true;
  if (o.t_mm) cfg.seg.body_span_mm = *o.t_mm;
  if (o.epsilon_mm) cfg.tracker.diff_epsilon_mm = *o.epsilon_mm;
  if (o.grid_cell) cfg.tracker.grid_cell = *o.grid_cell;
  if (o.alert_pct) cfg.tracker.area_alert_pct = *o.alert_pct;
  if (o.persistence) cfg.tracker.persistence = *o.persistence;
  cfg.validate();
  return cfg;
}

void emit(const CommandResult& res, const std::string& out_dir, bool to_stdout) {
  const std::string text = res.report.dump(2) + "\n";
  if (to_stdout) std::cout << text;
  if (!out_dir.empty()) {
    std::ofstream f(fs::path(out_dir) / "report.json", std::ios::trunc);
    f << text;
    if (!f) throw PgmError(PgmError::Kind::kWrite, "cannot write report.json");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-image segmentation and driver distraction monitoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Overrides seg_o, loc_o, mon_o;
  std::vector<std::string> seg_in, loc_in, mon_in;
  std::string synth_spec, synth_out;

  auto* seg = app.add_subcommand("segment", "Segment depth frames into regions");
  seg->add_option("frames", seg_in, "16-bit PGM frames")->required();
  add_pipeline_flags(seg, seg_o);

  auto* loc = app.add_subcommand("locate-driver", "Find the driver bounding box");
  loc->add_option("frames", loc_in, "16-bit PGM frames")->required();
  add_pipeline_flags(loc, loc_o);

  auto* mon = app.add_subcommand("monitor", "Track motion against frame 0 and raise alerts");
  mon->add_option("frames", mon_in, "Frame directory or files; frame 0 is the reference")->required();
  add_pipeline_flags(mon, mon_o);

  auto* syn = app.add_subcommand("synth", "Generate a synthetic scene or sequence");
  syn->add_option("spec", synth_spec, "Scene or sequence spec JSON")->required();
  syn->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  const auto to_paths = [](const std::vector<std::string>& v) {
    return std::vector<fs::path>(v.begin(), v.end());
  };

  try {
    if (*seg) {
      const PipelineConfig cfg = resolve(seg_o);
      const auto res = run_segment(to_paths(seg_in), cfg);
      emit(res, cfg.out_dir, true);
      return res.exit_code;
    }
    if (*loc) {
      const PipelineConfig cfg = resolve(loc_o);
      const auto res = run_locate_driver(to_paths(loc_in), cfg);
      emit(res, cfg.out_dir, true);
      return res.exit_code;
    }
    if (*mon) {
      const PipelineConfig cfg = resolve(mon_o);
      const auto frames = expand_frame_inputs(to_paths(mon_in));
      std::optional<std::ofstream> ndjson;
      if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        ndjson.emplace(fs::path(cfg.out_dir) / "frames.ndjson", std::ios::trunc);
      }
      const auto res = run_monitor(frames, cfg, ndjson ? *ndjson : std::cout);
      emit(res, cfg.out_dir, false);
      std::cerr << "monitor: " << frames.size() << " frames, median step "
                << res.report["timings"]["median_ms"].get<double>() << " ms, "
                << res.report["alerts"].size() << " alert(s)\n";
      return res.exit_code;
    }
    if (*syn) {
      const auto res = run_synth(synth_spec, synth_out);
      emit(res, "", true);
      return res.exit_code;
    }
  } catch (const NoDriverFound& e) {
    std::cerr << "depthseg: " << e.what() << '\n';
    std::cout << nlohmann::json{{"status", "no driver found"}}.dump() << '\n';
    return kExitNoDriver;
  } catch (const PgmError& e) {
    std::cerr << "depthseg: " << e.what() << '\n';
    return kExitInputError;
  } catch (const EmptyHistogram& e) {
    std::cerr << "depthseg: " << e.what() << '\n';
    return kExitInputError;
  } catch (const SpecError& e) {
    std::cerr << "depthseg: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ConfigError& e) {
    std::cerr << "depthseg: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "depthseg: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
