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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "foreval/baselines.hpp"
#include "foreval/io.hpp"
#include "foreval/metrics.hpp"
#include "foreval/synth.hpp"

// Exit codes: 0 success, 1 metric-undefined warnings present, 2 input errors.

namespace {

using namespace foreval;

int run_evaluate(const std::string& gt_path, const std::string& pred_path,
                 const std::string& profile, int k, bool nuscenes_clip, const std::string& out_path,
                 const std::string& pr_csv_dir, unsigned threads) {
  const GtData gt = load_gt(gt_path);
  const PredData pred = load_pred(pred_path, gt);

  EvalConfig cfg = EvalConfig::for_profile(
      profile == "pedestrian" ? ClassProfile::kPedestrian : ClassProfile::kCar, gt.timeline, k);
  cfg.nuscenes_clip = nuscenes_clip;

  const EvalReport report =
      evaluate(gt.scenes, pred.scenes, cfg, threads, gt.digest, pred.digest);
  std::cout << render_table(report);
  if (!out_path.empty()) save_report(out_path, report);
  if (!pr_csv_dir.empty()) write_pr_csvs(report, pr_csv_dir);
  return report.warnings.empty() ? 0 : 1;
}

int run_baseline(const std::string& gt_path, const std::string& dets_path,
                 const std::string& method, double backcast_radius, const std::string& out_path) {
  const GtData gt = load_gt(gt_path);
  const DetData dets = load_dets(dets_path);
  if (dets.timeline.horizon_steps != gt.timeline.horizon_steps ||
      dets.timeline.dt != gt.timeline.dt) {
    throw IoError("det file timeline does not match the ground-truth timeline");
  }

  std::vector<PredScene> out;
  std::size_t total_discarded = 0;
  for (const DetScene& scene : dets.scenes) {
    PredScene ps;
    ps.scene_id = scene.scene_id;
    if (method == "const-pos") {
      ps.forecasts = constant_position(scene.detections, gt.timeline);
    } else if (method == "const-vel") {
      ps.forecasts = constant_velocity(scene.detections, gt.timeline);
    } else if (method == "forward") {
      for (std::size_t i = 0; i < scene.detections.size(); ++i) {
        if (scene.step_velocities[i].empty()) {
          throw IoError("scene '" + scene.scene_id + "': detection " + std::to_string(i) +
                        " has no step_velocities (required by --method forward)");
        }
      }
      ps.forecasts = forward_integrate(scene.detections, scene.step_velocities, gt.timeline);
    } else {  // backcast
      BackcastResult res =
          backcast_assemble(scene.detections, scene.future_detections, gt.timeline, backcast_radius);
      total_discarded += res.discarded;
      ps.forecasts = std::move(res.forecasts);
    }
    out.push_back(std::move(ps));
  }
  save_pred(out_path, out);
  if (method == "backcast") {
    std::cout << "backcast: discarded " << total_discarded << " future detections without anchors\n";
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_synth_cmd(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
                  unsigned threads) {
  ojson root;
  try {
    root = ojson::parse(read_file(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("config file '" + config_path + "': " + e.what());
  }
  const SynthConfig cfg = synth_config_from_json(root, "config file '" + config_path + "'");
  const SynthOutput world = run_synth(cfg, seed, threads);
  std::filesystem::create_directories(out_dir);
  const auto gt_path = (std::filesystem::path(out_dir) / "gt.json").string();
  const auto det_path = (std::filesystem::path(out_dir) / "dets.json").string();
  save_gt(gt_path, cfg.timeline, world.gt_scenes);
  save_dets(det_path, cfg.timeline, world.det_scenes);
  std::size_t n_traj = 0;
  for (const GtScene& s : world.gt_scenes) n_traj += s.trajectories.size();
  std::cout << "wrote " << gt_path << " and " << det_path << " (" << world.gt_scenes.size()
            << " scenes, " << n_traj << " trajectories)\n";
  return 0;
}

int run_breakdown_cmd(const std::string& config_path, std::uint64_t seed,
                      const std::string& out_path, unsigned threads) {
  ojson root;
  try {
    root = ojson::parse(read_file(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("config file '" + config_path + "': " + e.what());
  }
  const BreakdownConfig cfg = breakdown_config_from_json(root, "config file '" + config_path + "'");
  const BreakdownTable table = run_breakdown_experiment(cfg, seed, threads);
  std::cout << render_breakdown(table);
  if (!out_path.empty()) write_file(out_path, breakdown_to_json(table).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"foreval - joint detection and forecasting evaluation in bird's-eye view"};
  app.require_subcommand(1);

  std::string gt_path, pred_path, dets_path, out_path, pr_csv_dir, config_path;
  std::string profile = "car", method;
  int k = 1;
  bool nuscenes_clip = false;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  double backcast_radius = std::numeric_limits<double>::infinity();

  CLI::App* ev = app.add_subcommand("evaluate", "evaluate predictions against ground truth");
  ev->add_option("--gt", gt_path, "ground-truth JSON file")->required();
  ev->add_option("--pred", pred_path, "prediction JSON file")->required();
  ev->add_option("--profile", profile, "threshold profile: car|pedestrian")
      ->check(CLI::IsMember({"car", "pedestrian"}));
  ev->add_option("--k", k, "top-K candidates per detection");
  ev->add_flag("--nuscenes-clip", nuscenes_clip, "clip low recall/precision in AP integration");
  ev->add_option("--out", out_path, "write the JSON report here");
  ev->add_option("--pr-csv", pr_csv_dir, "dump one PR CSV per (subclass, threshold pair) here");
  ev->add_option("--threads", threads, "worker threads");

  CLI::App* bl = app.add_subcommand("baseline", "generate baseline forecasts from detections");
  bl->add_option("--gt", gt_path, "ground-truth JSON file (for the timeline)")->required();
  bl->add_option("--dets", dets_path, "detector output JSON file")->required();
  bl->add_option("--method", method, "const-pos|const-vel|forward|backcast")
      ->required()
      ->check(CLI::IsMember({"const-pos", "const-vel", "forward", "backcast"}));
  bl->add_option("--backcast-radius", backcast_radius, "max anchor distance (default unbounded)");
  bl->add_option("--out", out_path, "output prediction JSON file")->required();

  CLI::App* sy = app.add_subcommand("synth", "generate a synthetic world and detector outputs");
  sy->add_option("--config", config_path, "synth configuration JSON")->required();
  sy->add_option("--seed", seed, "master seed");
  sy->add_option("--out-dir", out_path, "output directory")->required();
  sy->add_option("--threads", threads, "worker threads");

  CLI::App* bd = app.add_subcommand("breakdown", "metric comparison of reference forecasters");
  bd->add_option("--config", config_path, "breakdown configuration JSON")->required();
  bd->add_option("--seed", seed, "master seed");
  bd->add_option("--out", out_path, "write the JSON table here");
  bd->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ev->parsed()) {
      return run_evaluate(gt_path, pred_path, profile, k, nuscenes_clip, out_path, pr_csv_dir,
                          threads);
    }
    if (bl->parsed()) return run_baseline(gt_path, dets_path, method, backcast_radius, out_path);
    if (sy->parsed()) return run_synth_cmd(config_path, seed, out_path, threads);
    if (bd->parsed()) return run_breakdown_cmd(config_path, seed, out_path, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
