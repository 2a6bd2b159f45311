// Copyright 2026 The Foreval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "foreval/io.hpp"

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "foreval/metrics.hpp"

namespace foreval {
namespace {

using fixtures::gt_arc;
using fixtures::gt_cv;
using fixtures::kTimeline;
using fixtures::one_gt_scene;
using fixtures::one_pred_scene;
using fixtures::pred_oracle;
using fixtures::pred_to;

std::string temp_path(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

TEST(GtIo, RoundTrip) {
  const std::vector<GtScene> scenes = one_gt_scene(
      {gt_cv("s", {0, 0}, {0, 0}), gt_cv("l", {20, 0}, {3, 0}), gt_arc("a", {0, 30}, 3.2, 0.4),
       gt_cv("partial", {50, 0}, {1, 0}, kTimeline, 3)});
  const std::string path = temp_path("gt_roundtrip.json");
  save_gt(path, kTimeline, scenes);
  const GtData loaded = load_gt(path);
  EXPECT_EQ(loaded.timeline, kTimeline);
  ASSERT_EQ(loaded.scenes.size(), scenes.size());
  EXPECT_EQ(loaded.scenes[0], scenes[0]);
  EXPECT_FALSE(loaded.digest.empty());
}

TEST(GtIo, MinimalFileLoads) {
  const std::string path = temp_path("gt_minimal.json");
  write_file(path, R"({
    "version": 1,
    "timeline": {"t_obs": 0, "horizon_steps": 2, "dt": 0.5},
    "scenes": [{"scene_id": "s0", "trajectories": [
      {"instance_id": "a", "boxes": [
        {"offset": 0, "cx": 0, "cy": 0, "length": 4, "width": 2, "yaw": 0},
        {"offset": 1, "cx": 4, "cy": 0, "length": 4, "width": 2, "yaw": 0},
        {"offset": 2, "cx": 8, "cy": 0, "length": 4, "width": 2, "yaw": 0}]}]}]
  })");
  const GtData gt = load_gt(path);
  ASSERT_EQ(gt.scenes.size(), 1u);
  ASSERT_EQ(gt.scenes[0].trajectories.size(), 1u);
  EXPECT_TRUE(gt.scenes[0].trajectories[0].complete);
  EXPECT_EQ(gt.scenes[0].trajectories[0].subclass, MotionSubclass::kLinear);
}

TEST(GtIo, FieldErrorsNameThePath) {
  const std::string path = temp_path("gt_bad.json");
  write_file(path, R"({
    "version": 1,
    "timeline": {"t_obs": 0, "horizon_steps": 2, "dt": 0.5},
    "scenes": [{"scene_id": "s0", "trajectories": [
      {"instance_id": "a", "boxes": [
        {"offset": 1, "cx": 0, "cy": 0, "length": 4, "width": 2, "yaw": 0}]}]}]
  })");
  try {
    load_gt(path);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("/scenes/0/trajectories/0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("offset 0"), std::string::npos) << msg;
  }
}

TEST(GtIo, VersionMismatchRejected) {
  const std::string path = temp_path("gt_badversion.json");
  write_file(path, R"({"version": 99, "timeline": {"t_obs":0,"horizon_steps":2,"dt":0.5}, "scenes": []})");
  EXPECT_THROW(load_gt(path), IoError);
}

GtData small_gt() {
  const std::string path = temp_path("gt_small.json");
  save_gt(path, kTimeline, one_gt_scene({gt_cv("g", {0, 0}, {2, 0})}));
  return load_gt(path);
}

TEST(PredIo, RoundTrip) {
  const GtData gt = small_gt();
  std::vector<PredScene> scenes = one_pred_scene(
      {pred_to({0, 0}, {6, 0}, 0.9), pred_to({5, 5}, {1, 1}, 0.4, 0.7)});
  const std::string path = temp_path("pred_roundtrip.json");
  save_pred(path, scenes);
  const PredData loaded = load_pred(path, gt);
  ASSERT_EQ(loaded.scenes.size(), 1u);
  EXPECT_EQ(loaded.scenes[0], scenes[0]);
}

TEST(PredIo, WaypointCountErrorNamesForecast) {
  const GtData gt = small_gt();
  const std::string path = temp_path("pred_shortwps.json");
  write_file(path, R"({
    "version": 1,
    "scenes": [{"scene_id": "s0", "forecasts": [
      {"anchor": {"cx":0,"cy":0,"length":4,"width":2,"yaw":0}, "det_score": 0.9,
       "candidates": [{"waypoints": [[1,0],[2,0],[3,0],[4,0],[5,0]], "forecast_score": 0.9}]}]}]
  })");
  try {
    load_pred(path, gt);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("/scenes/0/forecasts/0/candidates/0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("expected 6 waypoints, got 5"), std::string::npos) << msg;
  }
}

TEST(PredIo, ScoreOutOfRangeRejected) {
  const GtData gt = small_gt();
  const std::string path = temp_path("pred_badscore.json");
  write_file(path, R"({
    "version": 1,
    "scenes": [{"scene_id": "s0", "forecasts": [
      {"anchor": {"cx":0,"cy":0,"length":4,"width":2,"yaw":0}, "det_score": 1.2,
       "candidates": [{"waypoints": [[1,0],[2,0],[3,0],[4,0],[5,0],[6,0]], "forecast_score": 0.9}]}]}]
  })");
  EXPECT_THROW(load_pred(path, gt), IoError);
}

TEST(PredIo, UnknownSceneRejected) {
  const GtData gt = small_gt();
  const std::string path = temp_path("pred_badscene.json");
  write_file(path, R"({"version": 1, "scenes": [{"scene_id": "nope", "forecasts": []}]})");
  EXPECT_THROW(load_pred(path, gt), IoError);
}

TEST(DetIo, RoundTrip) {
  SynthConfig cfg;
  cfg.n_scenes = 2;
  cfg.timeline = kTimeline;
  cfg.noise.pos_sigma = 0.1;
  cfg.noise.vel_sigma = 0.4;
  cfg.noise.clutter_rate = 1.0;
  const SynthOutput world = run_synth(cfg, 3);
  const std::string path = temp_path("dets_roundtrip.json");
  save_dets(path, cfg.timeline, world.det_scenes);
  const DetData loaded = load_dets(path);
  EXPECT_EQ(loaded.timeline, cfg.timeline);
  ASSERT_EQ(loaded.scenes.size(), world.det_scenes.size());
  for (std::size_t i = 0; i < loaded.scenes.size(); ++i) {
    ASSERT_EQ(loaded.scenes[i].detections.size(), world.det_scenes[i].detections.size());
    for (std::size_t d = 0; d < loaded.scenes[i].detections.size(); ++d) {
      EXPECT_EQ(loaded.scenes[i].detections[d].box, world.det_scenes[i].detections[d].box);
      EXPECT_EQ(loaded.scenes[i].detections[d].velocity, world.det_scenes[i].detections[d].velocity);
      EXPECT_EQ(loaded.scenes[i].step_velocities[d], world.det_scenes[i].step_velocities[d]);
    }
    ASSERT_EQ(loaded.scenes[i].future_detections.size(),
              world.det_scenes[i].future_detections.size());
    for (std::size_t f = 0; f < loaded.scenes[i].future_detections.size(); ++f) {
      EXPECT_EQ(loaded.scenes[i].future_detections[f].position,
                world.det_scenes[i].future_detections[f].position);
      EXPECT_EQ(loaded.scenes[i].future_detections[f].back_offsets,
                world.det_scenes[i].future_detections[f].back_offsets);
    }
  }
}

TEST(ReportIo, SerializationRoundTripIsExact) {
  std::vector<GtTrajectory> trajs = {gt_cv("s", {0, 0}, {0, 0}), gt_cv("l", {20, 0}, {3, 0}),
                                     gt_arc("a", {0, 30}, 3.2, 0.4),
                                     gt_cv("partial", {60, 0}, {1, 0}, kTimeline, 4)};
  std::vector<ForecastSet> preds = {pred_oracle(trajs[0], 0.95), pred_oracle(trajs[1], 0.85),
                                    pred_to({0.4, 30}, {7, 33}, 0.7),
                                    pred_to({100, 100}, {100, 100}, 0.2)};
  const EvalReport report = evaluate(one_gt_scene(std::move(trajs)),
                                     one_pred_scene(std::move(preds)),
                                     EvalConfig::for_profile(ClassProfile::kCar, kTimeline, 1), 1,
                                     "gtdigest", "preddigest");
  const std::string path = temp_path("report.json");
  save_report(path, report);
  const EvalReport loaded = load_report(path);
  EXPECT_EQ(loaded, report);

  // Dumping the parsed report again is byte-identical.
  EXPECT_EQ(report_to_json(loaded).dump(2), report_to_json(report).dump(2));
}

TEST(ReportIo, TableAgreesWithJsonAtPrintedPrecision) {
  const auto gts = one_gt_scene({gt_cv("g", {0, 0}, {2, 0})});
  const auto preds = one_pred_scene({pred_to({0, 0}, {11, 0}, 0.9)});  // AP_f 0.25
  const EvalReport report =
      evaluate(gts, preds, EvalConfig::for_profile(ClassProfile::kCar, kTimeline, 1));
  const std::string table = render_table(report);
  char expected[32];
  std::snprintf(expected, sizeof(expected), "%6.3f", report.map_f);
  EXPECT_NE(table.find(expected), std::string::npos) << table;
}

TEST(CsvIo, OneFilePerSubclassPair) {
  const auto gts = one_gt_scene({gt_cv("g", {0, 0}, {2, 0})});
  const auto preds = one_pred_scene({pred_to({0, 0}, {6, 0}, 0.9)});
  const EvalReport report =
      evaluate(gts, preds, EvalConfig::for_profile(ClassProfile::kCar, kTimeline, 1));
  const std::string dir = temp_path("prcsv");
  write_pr_csvs(report, dir);
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    ++files;
    const std::string body = read_file(entry.path().string());
    EXPECT_EQ(body.rfind("recall,precision\n", 0), 0u) << entry.path();
  }
  EXPECT_EQ(files, 4);  // one populated subclass x four pairs
}

TEST(ConfigIo, SynthAndBreakdownParsing) {
  const ojson j = ojson::parse(R"({
    "n_scenes": 5,
    "timeline": {"t_obs": 0, "horizon_steps": 4, "dt": 0.25},
    "sampler": {"mixture": {"static": 0.5, "linear": 0.3, "non_linear": 0.2},
                 "agents_min": 3, "agents_max": 5, "speed_range": [2.0, 3.0]},
    "noise": {"pos_sigma": 0.2, "vel_sigma": 1.0, "drop_prob": 0.1}
  })");
  const SynthConfig cfg = synth_config_from_json(j);
  EXPECT_EQ(cfg.n_scenes, 5);
  EXPECT_EQ(cfg.timeline.horizon_steps, 4);
  EXPECT_DOUBLE_EQ(cfg.sampler.mixture[1], 0.3);
  EXPECT_DOUBLE_EQ(cfg.sampler.speed_range[1], 3.0);
  EXPECT_DOUBLE_EQ(cfg.noise.pos_sigma, 0.2);

  const ojson bj = ojson::parse(R"({
    "synth": {"n_scenes": 2},
    "k": 5,
    "stationarity": {"overlap_radius": 1.5, "moving_penalty": 0.2}
  })");
  const BreakdownConfig bcfg = breakdown_config_from_json(bj);
  EXPECT_EQ(bcfg.synth.n_scenes, 2);
  EXPECT_EQ(bcfg.k, 5);
  EXPECT_DOUBLE_EQ(bcfg.stationarity_overlap_radius, 1.5);
  EXPECT_DOUBLE_EQ(bcfg.stationarity_moving_penalty, 0.2);
}

TEST(Digest, StableAndSensitive) {
  EXPECT_EQ(digest_bytes("abc"), digest_bytes("abc"));
  EXPECT_NE(digest_bytes("abc"), digest_bytes("abd"));
  EXPECT_EQ(digest_bytes("abc").size(), 16u);
}

}  // namespace
}  // namespace foreval
