#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "depthseg/app.hpp"
#include "depthseg/pgm_io.hpp"
#include "support/cli_runner.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;
using namespace depthseg;
using depthseg::testkit::run_cli;
using depthseg::testkit::scratch_dir;
using depthseg::testkit::slurp;

namespace {

std::string spec(const std::string& name) { return testkit::data_path("specs/" + name + ".json"); }

fs::path synth_scene(const std::string& name, const std::string& dir) {
  const fs::path out = scratch_dir(dir);
  EXPECT_EQ(run_cli({"synth", spec(name), "--out", out.string()}).exit_code, 0);
  return out;
}

PixelMask load_mask(const fs::path& p) {
  const GrayImage g = load_gray_pgm(p);
  PixelMask m(g.width, g.height);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) m.set(i, g.pixels[i] != 0);
  return m;
}

void write_json(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(); }

}  // namespace

TEST(CliSynth, BundledSpecsGenerate) {
  for (const char* name : {"multi_person", "same_depth_pair", "ramp_floor", "cabin", "cabin_sequence"}) {
    const fs::path out = scratch_dir(std::string("synth_") + name);
    const auto r = run_cli({"synth", spec(name), "--out", out.string()});
    EXPECT_EQ(r.exit_code, 0) << name;
    EXPECT_TRUE(fs::exists(out / "oracle.json")) << name;
  }
}

TEST(CliSynth, RegenerationIsBitIdenticalAndSeedOnlyChangesJitter) {
  const fs::path a = synth_scene("same_depth_pair", "regen_a");
  const fs::path b = synth_scene("same_depth_pair", "regen_b");
  for (const char* f : {"frame.pgm", "blob_0.pgm", "blob_1.pgm", "oracle.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

  auto doc = testkit::read_json(spec("same_depth_pair"));
  doc["rng_seed"] = 6;
  const fs::path c = scratch_dir("regen_c");
  write_json(c / "spec.json", doc);
  ASSERT_EQ(run_cli({"synth", (c / "spec.json").string(), "--out", c.string()}).exit_code, 0);
  EXPECT_NE(slurp(a / "frame.pgm"), slurp(c / "frame.pgm"));
  EXPECT_EQ(slurp(a / "blob_0.pgm"), slurp(c / "blob_0.pgm"));
  EXPECT_EQ(slurp(a / "oracle.json"), slurp(c / "oracle.json"));
}

TEST(CliSynth, InvalidSpecIsInputError) {
  const fs::path d = scratch_dir("bad_spec");
  write_json(d / "spec.json", {{"width", 10}, {"height", 10}, {"blobs", {{{"shape", "rectangle"}, {"bbox", {5, 5, 9, 9}}, {"depth", 100}}}}});
  EXPECT_EQ(run_cli({"synth", (d / "spec.json").string(), "--out", d.string()}).exit_code, 2);
  EXPECT_EQ(run_cli({"synth", (d / "missing.json").string(), "--out", d.string()}).exit_code, 2);
}

TEST(CliSegment, FourPersonSceneMatchesOracleBodies) {
  const fs::path scene = synth_scene("multi_person", "seg4_scene");
  const fs::path out = scratch_dir("seg4_out");
  const auto r = run_cli({"segment", (scene / "frame.pgm").string(), "--out", out.string()});
  ASSERT_EQ(r.exit_code, 0);
  const auto report = r.json();
  const auto& frame = report["frames"][0];
  EXPECT_GE(frame["intervals"].get<int>(), 2);

  std::vector<PixelMask> regions;
  for (const auto& roi : frame["rois"])
    for (const auto& reg : roi["regions"]) regions.push_back(load_mask(out / reg["mask"].get<std::string>()));
  ASSERT_FALSE(regions.empty());
  std::vector<PixelMask> blobs;
  for (int b = 0; b < 8; ++b) blobs.push_back(load_mask(scene / ("blob_" + std::to_string(b) + ".pgm")));
  for (int person = 0; person < 4; ++person) {
    const PixelMask body = testkit::mask_union(blobs, {2 * person, 2 * person + 1});
    double best = 0.0;
    for (const auto& m : regions) best = std::max(best, mask_iou(m, body));
    EXPECT_GE(best, 0.8) << "person " << person;
  }
  EXPECT_EQ(slurp(out / "report.json"), r.out);
  EXPECT_EQ(slurp(out / "frame_histogram.csv").rfind("depth_mm,count\n", 0), 0u);
}

TEST(CliSegment, SinglePlaneIsOneIntervalOneRegion) {
  const fs::path d = scratch_dir("plane");
  save_depth_frame(DepthFrame(64, 48, std::vector<Depth>(64 * 48, 1800)), d / "plane.pgm");
  const auto r = run_cli({"segment", (d / "plane.pgm").string()});
  ASSERT_EQ(r.exit_code, 0);
  const auto report = r.json();
  const auto& frame = report["frames"][0];
  EXPECT_EQ(frame["intervals"], 1);
  ASSERT_EQ(frame["rois"][0]["regions"].size(), 1u);
  EXPECT_EQ(frame["rois"][0]["regions"][0]["pixel_count"], 64 * 48);
}

TEST(CliSegment, BadInputsAreInputErrors) {
  const fs::path d = scratch_dir("bad_inputs");
  save_depth_frame(DepthFrame(16, 16), d / "zero.pgm");
  EXPECT_EQ(run_cli({"segment", (d / "zero.pgm").string()}).exit_code, 2);
  EXPECT_EQ(run_cli({"segment", (d / "nope.pgm").string()}).exit_code, 2);
  std::ofstream(d / "eight.pgm", std::ios::binary) << "P5\n1 1\n255\n" << char(7);
  EXPECT_EQ(run_cli({"segment", (d / "eight.pgm").string()}).exit_code, 2);
  EXPECT_EQ(run_cli({"segment"}).exit_code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).exit_code, 2);
}

TEST(CliLocate, CabinDriverBox) {
  const fs::path scene = synth_scene("cabin", "loc_cabin");
  const auto r = run_cli({"locate-driver", (scene / "frame.pgm").string()});
  ASSERT_EQ(r.exit_code, 0);
  const auto report = r.json();
  const auto& f = report["frames"][0];
  EXPECT_EQ(f["status"], "ok");
  const auto b = f["driver"]["bbox"];
  const Rect got{b[0], b[1], b[2], b[3]};
  const auto oracle = testkit::read_json((scene / "oracle.json").string());
  const auto t = oracle["blob_boxes"][1], h = oracle["blob_boxes"][2];
  const Rect truth = testkit::box_union(Rect{t[0], t[1], t[2], t[3]}, Rect{h[0], h[1], h[2], h[3]});
  EXPECT_GE(iou(got, truth), 0.8);
}

TEST(CliLocate, NoDriverHasItsOwnExitCode) {
  auto doc = testkit::read_json(spec("cabin"));
  doc["blobs"] = nlohmann::json::array({doc["blobs"][0]});
  const fs::path d = scratch_dir("empty_cabin");
  write_json(d / "spec.json", doc);
  ASSERT_EQ(run_cli({"synth", (d / "spec.json").string(), "--out", d.string()}).exit_code, 0);
  const auto r = run_cli({"locate-driver", (d / "frame.pgm").string()});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(r.json()["frames"][0]["status"], "no driver found");

  const fs::path cabin = synth_scene("cabin", "loc_strict");
  write_json(cabin / "strict.json", {{"min_aspect", 20.0}, {"max_aspect", 30.0}});
  EXPECT_EQ(run_cli({"locate-driver", (cabin / "frame.pgm").string(), "--config", (cabin / "strict.json").string()}).exit_code, 3);
}

TEST(CliLocate, DumpMasksWritesDriverMask) {
  const fs::path scene = synth_scene("cabin", "loc_masks");
  const fs::path out = scratch_dir("loc_masks_out");
  ASSERT_EQ(run_cli({"locate-driver", (scene / "frame.pgm").string(), "--out", out.string(), "--dump-masks"}).exit_code, 0);
  EXPECT_TRUE(fs::exists(out / "frame_driver.pgm"));
}

TEST(CliConfig, CommandLineOverridesFile) {
  const fs::path scene = synth_scene("same_depth_pair", "cfg_scene");
  write_json(scene / "cfg.json", {{"t_mm", 600}, {"persistence", 7}});
  const auto r = run_cli({"segment", (scene / "frame.pgm").string(), "--config", (scene / "cfg.json").string(), "--t-mm", "500"});
  ASSERT_EQ(r.exit_code, 0);
  const auto cfg = r.json().at("config");
  EXPECT_EQ(cfg["t_mm"], 500);
  EXPECT_EQ(cfg["persistence"], 7);

  write_json(scene / "unknown.json", {{"t_millimetres", 600}});
  EXPECT_EQ(run_cli({"segment", (scene / "frame.pgm").string(), "--config", (scene / "unknown.json").string()}).exit_code, 2);
  EXPECT_EQ(run_cli({"segment", (scene / "frame.pgm").string(), "--t-mm", "0"}).exit_code, 2);

  write_json(scene / "snapshot.json", cfg);
  const auto again = run_cli({"segment", (scene / "frame.pgm").string(), "--config", (scene / "snapshot.json").string()});
  EXPECT_EQ(reproducible_dump(again.json()), reproducible_dump(r.json()));
}

TEST(CliMonitor, ReachSequenceAlertsOnceStaticDoesNot) {
  const fs::path seq = synth_scene("cabin_sequence", "mon_seq");
  const fs::path out = scratch_dir("mon_out");
  const auto r = run_cli({"monitor", seq.string(), "--out", out.string(), "--dump-gray"});
  ASSERT_EQ(r.exit_code, 0);
  const auto report = testkit::read_json((out / "report.json").string());
  ASSERT_EQ(report["frames"].size(), 91u);
  ASSERT_EQ(report["alerts"].size(), 1u);
  const int onset = report["alerts"][0]["frame_index"];
  EXPECT_GE(onset, 31);
  EXPECT_LE(onset, 36);
  EXPECT_TRUE(fs::exists(out / "gray_00045.pgm"));
  EXPECT_GT(report["timings"]["median_ms"].get<double>(), 0.0);

  std::ifstream nd(out / "frames.ndjson");
  int frames = 0, alerts = 0;
  for (std::string line; std::getline(nd, line);) {
    const auto j = nlohmann::json::parse(line);
    frames += j["type"] == "frame";
    alerts += j["type"] == "alert";
  }
  EXPECT_EQ(frames, 91);
  EXPECT_EQ(alerts, 1);

  const fs::path still = scratch_dir("mon_static");
  for (int t = 0; t < 30; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05d.pgm", t);
    fs::copy_file(seq / "frame_00000.pgm", still / name);
  }
  const auto s = run_cli({"monitor", still.string()});
  ASSERT_EQ(s.exit_code, 0);
  EXPECT_NE(s.out.find("\"type\":\"frame\""), std::string::npos);
  EXPECT_EQ(s.out.find("\"type\":\"alert\""), std::string::npos);
}

TEST(CliMonitor, NoDriverOnReferenceAborts) {
  const fs::path d = scratch_dir("mon_nodriver");
  save_depth_frame(DepthFrame(64, 48, std::vector<Depth>(64 * 48, 1800)), d / "a.pgm");
  EXPECT_EQ(run_cli({"monitor", d.string()}).exit_code, 3);
  EXPECT_EQ(run_cli({"monitor", d.string(), "--dump-gray"}).exit_code, 2);
}

TEST(CliReports, RerunsAreByteIdenticalWithoutTimings) {
  const fs::path scene = synth_scene("cabin", "det_scene");
  const std::string frame = (scene / "frame.pgm").string();
  for (const std::string cmd : {"segment", "locate-driver"}) {
    const auto a = run_cli({cmd, frame}), b = run_cli({cmd, frame});
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(reproducible_dump(a.json()), reproducible_dump(b.json())) << cmd;
  }
}
