#include "depthseg/app.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>

#include "depthseg/detection.hpp"
#include "depthseg/json_io.hpp"
#include "depthseg/motion_tracking.hpp"
#include "depthseg/pgm_io.hpp"
#include "depthseg/scene_synth.hpp"

namespace depthseg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json report_header(const char* command, const std::vector<fs::path>& inputs,
                   const json& config) {
  json in = json::array();
  for (const auto& p : inputs) in.push_back(p.generic_string());
  return json{{"tool", "depthseg"},
              {"version", kToolVersion},
              {"command", command},
              {"inputs", in},
              {"config", config}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PgmError(PgmError::Kind::kWrite, "cannot write " + path.string());
  out << text;
}

void prepare_out_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

std::string frame_stem(const fs::path& p, std::size_t index, std::size_t total) {
  return total == 1 ? p.stem().string() : std::to_string(index) + "_" + p.stem().string();
}

json histogram_summary(const DepthHistogram& h) {
  return json{{"bins", h.size()},
              {"min_depth", h.values.front()},
              {"max_depth", h.values.back()},
              {"total", h.total()}};
}

struct SegmentJob {
  json entry;
  double elapsed_ms = 0.0;
};

SegmentJob segment_one(const fs::path& path, const std::string& stem, const PipelineConfig& cfg) {
  const DepthFrame frame = load_depth_frame(path);
  const auto t0 = Clock::now();
  const FrameSegmentation seg = segment_frame(frame, cfg.seg, cfg.growth);
  SegmentJob job;
  job.elapsed_ms = ms_since(t0);

  json rois = json::array();
  std::size_t region_id = 0;
  for (std::size_t k = 0; k < seg.rois.size(); ++k) {
    const auto& r = seg.rois[k];
    json peaks = json::array();
    for (auto p : r.region.peaks) peaks.push_back(seg.histogram.values[p]);
    json regions = json::array();
    for (const auto& obj : r.objects) {
      json rj = region_json(obj);
      rj["id"] = region_id;
      if (!cfg.out_dir.empty()) {
        const std::string name = stem + "_region_" + std::to_string(region_id) + ".pgm";
        save_mask_pgm(obj.mask, fs::path(cfg.out_dir) / name);
        rj["mask"] = name;
      }
      regions.push_back(std::move(rj));
      ++region_id;
    }
    rois.push_back({{"index", k},
                    {"range", json::array({r.region.lo_idx, r.region.hi_idx})},
                    {"peaks_mm", peaks},
                    {"interval", to_json(r.interval)},
                    {"roi_pixels", r.roi_pixels},
                    {"regions", regions}});
  }
  if (!cfg.out_dir.empty()) {
    write_text(fs::path(cfg.out_dir) / (stem + "_histogram.csv"), histogram_csv(seg.histogram));
  }
  job.entry = json{{"input", path.generic_string()},
                   {"width", frame.width()},
                   {"height", frame.height()},
                   {"valid_pixels", valid_pixel_count(frame)},
                   {"histogram", histogram_summary(seg.histogram)},
                   {"intervals", rois.size()},
                   {"rois", rois}};
  return job;
}

struct LocateJob {
  json entry;
  bool found = false;
  double elapsed_ms = 0.0;
};

LocateJob locate_one(const fs::path& path, const std::string& stem, const PipelineConfig& cfg) {
  const DepthFrame frame = load_depth_frame(path);
  const auto t0 = Clock::now();
  const DriverSearch s = search_driver(frame, cfg.seg, cfg.growth, cfg.detector);
  LocateJob job;
  job.elapsed_ms = ms_since(t0);
  json candidates = json::array();
  for (const auto& c : s.candidates) candidates.push_back(candidate_json(c));
  job.entry = json{{"input", path.generic_string()}, {"candidates", candidates}};
  job.found = s.driver.has_value();
  if (s.driver) {
    const auto& d = s.candidates[*s.driver];
    job.entry["status"] = "ok";
    job.entry["driver"] = candidate_json(d);
    job.entry["driver"]["candidate_index"] = *s.driver;
    if (cfg.dump_masks && !cfg.out_dir.empty()) {
      const std::string name = stem + "_driver.pgm";
      save_mask_pgm(d.region.mask, fs::path(cfg.out_dir) / name);
      job.entry["driver"]["mask"] = name;
    }
  } else {
    job.entry["status"] = "no driver found";
    job.entry["driver"] = nullptr;
  }
  return job;
}

template <typename Job, typename Fn>
std::vector<Job> run_parallel(const std::vector<fs::path>& frames, Fn fn) {
  std::vector<std::future<Job>> futures;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    futures.push_back(std::async(std::launch::async, fn, frames[i],
                                 frame_stem(frames[i], i, frames.size())));
  }
  std::vector<Job> out;
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<fs::path> expand_frame_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".pgm") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end(),
                [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

std::string reproducible_dump(const json& report) {
  json copy = report;
  copy.erase("timings");
  return copy.dump(2);
}

CommandResult run_segment(const std::vector<fs::path>& frames, const PipelineConfig& cfg) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  const auto jobs = run_parallel<SegmentJob>(
      frames, [&cfg](const fs::path& p, const std::string& stem) { return segment_one(p, stem, cfg); });
  CommandResult res;
  res.report = report_header("segment", frames, to_json(cfg));
  res.report["frames"] = json::array();
  json timings = json::array();
  for (const auto& j : jobs) {
    res.report["frames"].push_back(j.entry);
    timings.push_back(j.elapsed_ms);
  }
  res.report["timings"] = {{"per_frame_ms", timings}};
  return res;
}

CommandResult run_locate_driver(const std::vector<fs::path>& frames, const PipelineConfig& cfg) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  const auto jobs = run_parallel<LocateJob>(
      frames, [&cfg](const fs::path& p, const std::string& stem) { return locate_one(p, stem, cfg); });
  CommandResult res;
  res.report = report_header("locate-driver", frames, to_json(cfg));
  res.report["frames"] = json::array();
  json timings = json::array();
  for (const auto& j : jobs) {
    res.report["frames"].push_back(j.entry);
    timings.push_back(j.elapsed_ms);
    if (!j.found) res.exit_code = kExitNoDriver;
  }
  res.report["timings"] = {{"per_frame_ms", timings}};
  return res;
}

CommandResult run_monitor(const std::vector<fs::path>& frames, const PipelineConfig& cfg,
                          std::ostream& stream) {
  cfg.validate();
  if (frames.empty()) throw ConfigError("monitor needs at least one frame");
  if (cfg.dump_gray && cfg.out_dir.empty()) throw ConfigError("--dump-gray needs --out");
  prepare_out_dir(cfg.out_dir);

  const DepthFrame first = load_depth_frame(frames.front());
  const BodyCandidate driver = locate_driver(first, cfg.seg, cfg.growth, cfg.detector);
  MotionTracker tracker(set_reference(first, driver), cfg.tracker);

  CommandResult res;
  res.report = report_header("monitor", frames, to_json(cfg));
  res.report["reference"] = {{"window", to_json(tracker.reference().window)},
                             {"a_r", tracker.reference().a_r},
                             {"driver", candidate_json(driver)}};
  if (cfg.dump_masks && !cfg.out_dir.empty()) {
    save_mask_pgm(driver.region.mask, fs::path(cfg.out_dir) / "reference_driver.pgm");
  }
  json frame_reports = json::array();
  json alerts = json::array();
  std::vector<double> step_ms;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const DepthFrame current = t == 0 ? first : load_depth_frame(frames[t]);
    const auto t0 = Clock::now();
    const auto step = tracker.step(current, t);
    step_ms.push_back(ms_since(t0));

    json line = to_json(step.report);
    frame_reports.push_back(line);
    line["type"] = "frame";
    stream << line.dump() << '\n';
    if (step.alert_event) {
      json a = to_json(*step.alert_event);
      alerts.push_back(a);
      a["type"] = "alert";
      stream << a.dump() << '\n';
    }
    stream.flush();
    if (cfg.dump_gray) {
      char name[32];
      std::snprintf(name, sizeof(name), "gray_%05zu.pgm", t);
      save_gray_pgm(recalibrate_gray(tracker.last_diff(), cfg.tracker), fs::path(cfg.out_dir) / name);
    }
  }
  res.report["frames"] = std::move(frame_reports);
  res.report["alerts"] = std::move(alerts);
  res.report["timings"] = {{"per_frame_ms", step_ms}, {"median_ms", median(step_ms)}};
  return res;
}

CommandResult run_synth(const fs::path& spec_path, const fs::path& out_dir) {
  std::ifstream in(spec_path);
  if (!in) throw SpecError("cannot open " + spec_path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SpecError(spec_path.string() + ": " + e.what());
  }
  fs::create_directories(out_dir);
  CommandResult res;
  res.report = report_header("synth", {spec_path}, json::object());
  res.report["out"] = out_dir.generic_string();

  if (is_sequence_spec(doc)) {
    const SequenceRenderer renderer(sequence_spec_from_json(doc));
    fs::create_directories(out_dir / "changed");
    res.report["spec"] = to_json(renderer.spec());
    json frames = json::array();
    json oracle_frames = json::array();
    for (int t = 0; t < renderer.frame_count(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%05d.pgm", t);
      save_depth_frame(renderer.frame(t), out_dir / name);
      frames.push_back(name);
      const SequenceFrameOracle o = renderer.oracle(t);
      std::snprintf(name, sizeof(name), "changed/changed_%05d.pgm", t);
      save_mask_pgm(o.changed, out_dir / name);
      json boxes = json::array();
      for (const auto& b : o.blob_boxes) boxes.push_back(to_json(b));
      oracle_frames.push_back({{"frame_index", t},
                               {"changed_count", o.changed_count},
                               {"changed_mask", name},
                               {"blob_changed", o.blob_changed},
                               {"blob_counts", o.blob_counts},
                               {"blob_boxes", boxes},
                               {"blob_visible", o.blob_visible}});
    }
    const json oracle{{"frames", oracle_frames}};
    write_text(out_dir / "oracle.json", oracle.dump(2) + "\n");
    res.report["frames"] = frames;
  } else {
    const SceneSpec spec = scene_spec_from_json(doc);
    const Scene scene = gen_scene(spec);
    res.report["spec"] = to_json(spec);
    save_depth_frame(scene.frame, out_dir / "frame.pgm");
    json masks = json::array();
    for (std::size_t b = 0; b < scene.oracle.blob_masks.size(); ++b) {
      const std::string name = "blob_" + std::to_string(b) + ".pgm";
      save_mask_pgm(scene.oracle.blob_masks[b], out_dir / name);
      masks.push_back(name);
    }
    json boxes = json::array();
    for (const auto& b : spec.blobs) boxes.push_back(to_json(b.bbox));
    const json oracle{{"blob_counts", scene.oracle.blob_counts},
                      {"blob_boxes", boxes},
                      {"blob_masks", masks},
                      {"background_count", scene.oracle.background_count},
                      {"valid_pixels", valid_pixel_count(scene.frame)}};
    write_text(out_dir / "oracle.json", oracle.dump(2) + "\n");
    res.report["frames"] = json::array({"frame.pgm"});
  }
  return res;
}

}  // namespace depthseg
