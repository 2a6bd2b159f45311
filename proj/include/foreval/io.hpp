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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foreval/config.hpp"
#include "foreval/report.hpp"
#include "foreval/synth.hpp"
#include "foreval/types.hpp"

// File formats. Everything is UTF-8 JSON with stable key order on write;
// numbers round-trip exactly. Validation errors name the offending field by
// its JSON path.

namespace foreval {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ojson = nlohmann::ordered_json;

inline constexpr int kGtFileVersion = 1;
inline constexpr int kPredFileVersion = 1;
inline constexpr int kDetFileVersion = 1;

// FNV-1a over the file bytes; an identity stamp for reports, not a security
// hash.
inline std::string digest_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << bytes;
}

namespace jsondetail {

inline const ojson& field(const ojson& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw IoError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw IoError(where + ": missing field '" + key + "'");
  return *it;
}

inline double as_number(const ojson& j, const std::string& where) {
  if (!j.is_number()) throw IoError(where + ": expected a number");
  return j.get<double>();
}

inline int as_int(const ojson& j, const std::string& where) {
  if (!j.is_number_integer()) throw IoError(where + ": expected an integer");
  return j.get<int>();
}

inline std::string as_string(const ojson& j, const std::string& where) {
  if (!j.is_string()) throw IoError(where + ": expected a string");
  return j.get<std::string>();
}

inline const ojson& as_array(const ojson& j, const std::string& where) {
  if (!j.is_array()) throw IoError(where + ": expected an array");
  return j;
}

inline double score_in_unit_range(const ojson& j, const std::string& where) {
  const double v = as_number(j, where);
  if (v < 0.0 || v > 1.0) {
    throw IoError(where + ": score " + std::to_string(v) + " outside [0,1]");
  }
  return v;
}

inline Vec2 as_vec2(const ojson& j, const std::string& where) {
  const auto& arr = as_array(j, where);
  if (arr.size() != 2) throw IoError(where + ": expected [x, y]");
  return {as_number(arr[0], where + "/0"), as_number(arr[1], where + "/1")};
}

inline void check_version(const ojson& j, int expected, const std::string& where) {
  const int v = as_int(field(j, "version", where), where + "/version");
  if (v != expected) {
    throw IoError(where + "/version: unsupported version " + std::to_string(v) + " (expected " +
                  std::to_string(expected) + ")");
  }
}

inline BevBox as_box(const ojson& j, const std::string& where) {
  try {
    return BevBox::make(as_number(field(j, "cx", where), where + "/cx"),
                        as_number(field(j, "cy", where), where + "/cy"),
                        as_number(field(j, "length", where), where + "/length"),
                        as_number(field(j, "width", where), where + "/width"),
                        as_number(field(j, "yaw", where), where + "/yaw"));
  } catch (const ValidationError& e) {
    throw IoError(where + ": " + e.what());
  }
}

inline ojson box_json(const BevBox& b) {
  return ojson{{"cx", b.cx}, {"cy", b.cy}, {"length", b.length}, {"width", b.width}, {"yaw", b.yaw}};
}

inline ojson vec2_json(const Vec2& v) { return ojson::array({v.x, v.y}); }

inline Timeline as_timeline(const ojson& j, const std::string& where) {
  Timeline tl;
  tl.t_obs_index = static_cast<std::int64_t>(as_number(field(j, "t_obs", where), where + "/t_obs"));
  tl.horizon_steps = as_int(field(j, "horizon_steps", where), where + "/horizon_steps");
  tl.dt = as_number(field(j, "dt", where), where + "/dt");
  try {
    tl.validate();
  } catch (const ValidationError& e) {
    throw IoError(where + ": " + e.what());
  }
  return tl;
}

inline ojson timeline_json(const Timeline& tl) {
  return ojson{{"t_obs", tl.t_obs_index}, {"horizon_steps", tl.horizon_steps}, {"dt", tl.dt}};
}

}  // namespace jsondetail

// ---------------------------------------------------------------------------
// Ground-truth files

struct GtData {
  Timeline timeline;
  std::vector<GtScene> scenes;
  std::string digest;
};

inline GtData parse_gt_json(const ojson& root, const std::string& where = "gt") {
  using namespace jsondetail;
  check_version(root, kGtFileVersion, where);
  GtData data;
  data.timeline = as_timeline(field(root, "timeline", where), where + "/timeline");
  const auto& scenes = as_array(field(root, "scenes", where), where + "/scenes");
  std::set<std::string> ids;
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const std::string sw = where + "/scenes/" + std::to_string(si);
    GtScene scene;
    scene.scene_id = as_string(field(scenes[si], "scene_id", sw), sw + "/scene_id");
    if (!ids.insert(scene.scene_id).second) {
      throw IoError(sw + "/scene_id: duplicate scene_id '" + scene.scene_id + "'");
    }
    const auto& trajs = as_array(field(scenes[si], "trajectories", sw), sw + "/trajectories");
    std::set<std::string> instance_ids;
    for (std::size_t ti = 0; ti < trajs.size(); ++ti) {
      const std::string tw = sw + "/trajectories/" + std::to_string(ti);
      GtTrajectory traj;
      traj.instance_id = as_string(field(trajs[ti], "instance_id", tw), tw + "/instance_id");
      if (!instance_ids.insert(traj.instance_id).second) {
        throw IoError(tw + "/instance_id: duplicate instance_id '" + traj.instance_id + "'");
      }
      const auto& boxes = as_array(field(trajs[ti], "boxes", tw), tw + "/boxes");
      for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
        const std::string bw = tw + "/boxes/" + std::to_string(bi);
        TimedBox tb;
        tb.offset = as_int(field(boxes[bi], "offset", bw), bw + "/offset");
        tb.box = as_box(boxes[bi], bw);
        traj.boxes.push_back(tb);
      }
      if (auto it = trajs[ti].find("velocity0"); it != trajs[ti].end() && !it->is_null()) {
        traj.velocity0 = as_vec2(*it, tw + "/velocity0");
      }
      try {
        traj = finalize_trajectory(std::move(traj), data.timeline);
      } catch (const ValidationError& e) {
        throw IoError(tw + ": " + e.what());
      }
      scene.trajectories.push_back(std::move(traj));
    }
    data.scenes.push_back(std::move(scene));
  }
  return data;
}

inline ojson gt_to_json(const Timeline& tl, const std::vector<GtScene>& scenes) {
  using namespace jsondetail;
  ojson root{{"version", kGtFileVersion}, {"timeline", timeline_json(tl)}};
  ojson jscenes = ojson::array();
  for (const GtScene& scene : scenes) {
    ojson jtrajs = ojson::array();
    for (const GtTrajectory& traj : scene.trajectories) {
      ojson jboxes = ojson::array();
      for (const TimedBox& tb : traj.boxes) {
        ojson jb = box_json(tb.box);
        ojson withoff{{"offset", tb.offset}};
        withoff.update(jb);
        jboxes.push_back(std::move(withoff));
      }
      ojson jt{{"instance_id", traj.instance_id}, {"boxes", std::move(jboxes)}};
      if (traj.velocity0) jt["velocity0"] = vec2_json(*traj.velocity0);
      jtrajs.push_back(std::move(jt));
    }
    jscenes.push_back(ojson{{"scene_id", scene.scene_id}, {"trajectories", std::move(jtrajs)}});
  }
  root["scenes"] = std::move(jscenes);
  return root;
}

inline GtData load_gt(const std::string& path) {
  const std::string bytes = read_file(path);
  ojson root;
  try {
    root = ojson::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("gt file '" + path + "': " + e.what());
  }
  GtData data = parse_gt_json(root, "gt file '" + path + "'");
  data.digest = digest_bytes(bytes);
  return data;
}

inline void save_gt(const std::string& path, const Timeline& tl, const std::vector<GtScene>& scenes) {
  write_file(path, gt_to_json(tl, scenes).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Prediction files

struct PredData {
  std::vector<PredScene> scenes;
  std::string digest;
};

inline PredData parse_pred_json(const ojson& root, const GtData& gt,
                                const std::string& where = "pred") {
  using namespace jsondetail;
  check_version(root, kPredFileVersion, where);
  std::set<std::string> gt_ids;
  for (const GtScene& s : gt.scenes) gt_ids.insert(s.scene_id);

  PredData data;
  const auto& scenes = as_array(field(root, "scenes", where), where + "/scenes");
  std::set<std::string> seen;
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const std::string sw = where + "/scenes/" + std::to_string(si);
    PredScene scene;
    scene.scene_id = as_string(field(scenes[si], "scene_id", sw), sw + "/scene_id");
    if (!seen.insert(scene.scene_id).second) {
      throw IoError(sw + "/scene_id: duplicate scene_id '" + scene.scene_id + "'");
    }
    if (!gt_ids.count(scene.scene_id)) {
      throw IoError(sw + "/scene_id: '" + scene.scene_id + "' not present in the ground-truth file");
    }
    const auto& fsets = as_array(field(scenes[si], "forecasts", sw), sw + "/forecasts");
    for (std::size_t fi = 0; fi < fsets.size(); ++fi) {
      const std::string fw = sw + "/forecasts/" + std::to_string(fi);
      ForecastSet fs;
      fs.anchor = as_box(field(fsets[fi], "anchor", fw), fw + "/anchor");
      fs.det_score = score_in_unit_range(field(fsets[fi], "det_score", fw), fw + "/det_score");
      const auto& cands = as_array(field(fsets[fi], "candidates", fw), fw + "/candidates");
      if (cands.empty()) throw IoError(fw + "/candidates: must be non-empty");
      for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        const std::string cw = fw + "/candidates/" + std::to_string(ci);
        ForecastCandidate cand;
        const auto& wps = as_array(field(cands[ci], "waypoints", cw), cw + "/waypoints");
        if (static_cast<int>(wps.size()) != gt.timeline.horizon_steps) {
          throw IoError(cw + "/waypoints: expected " + std::to_string(gt.timeline.horizon_steps) +
                        " waypoints, got " + std::to_string(wps.size()));
        }
        for (std::size_t wi = 0; wi < wps.size(); ++wi) {
          cand.waypoints.push_back(as_vec2(wps[wi], cw + "/waypoints/" + std::to_string(wi)));
        }
        cand.forecast_score =
            score_in_unit_range(field(cands[ci], "forecast_score", cw), cw + "/forecast_score");
        fs.candidates.push_back(std::move(cand));
      }
      scene.forecasts.push_back(std::move(fs));
    }
    data.scenes.push_back(std::move(scene));
  }
  return data;
}

inline ojson pred_to_json(const std::vector<PredScene>& scenes) {
  using namespace jsondetail;
  ojson root{{"version", kPredFileVersion}};
  ojson jscenes = ojson::array();
  for (const PredScene& scene : scenes) {
    ojson jf = ojson::array();
    for (const ForecastSet& fs : scene.forecasts) {
      ojson jcands = ojson::array();
      for (const ForecastCandidate& cand : fs.candidates) {
        ojson jwps = ojson::array();
        for (const Vec2& w : cand.waypoints) jwps.push_back(vec2_json(w));
        jcands.push_back(
            ojson{{"waypoints", std::move(jwps)}, {"forecast_score", cand.forecast_score}});
      }
      jf.push_back(ojson{{"anchor", box_json(fs.anchor)},
                         {"det_score", fs.det_score},
                         {"candidates", std::move(jcands)}});
    }
    jscenes.push_back(ojson{{"scene_id", scene.scene_id}, {"forecasts", std::move(jf)}});
  }
  root["scenes"] = std::move(jscenes);
  return root;
}

inline PredData load_pred(const std::string& path, const GtData& gt) {
  const std::string bytes = read_file(path);
  ojson root;
  try {
    root = ojson::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("pred file '" + path + "': " + e.what());
  }
  PredData data = parse_pred_json(root, gt, "pred file '" + path + "'");
  data.digest = digest_bytes(bytes);
  return data;
}

inline void save_pred(const std::string& path, const std::vector<PredScene>& scenes) {
  write_file(path, pred_to_json(scenes).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Detector output files (input to the baseline forecasters)

struct DetData {
  Timeline timeline;
  std::vector<DetScene> scenes;
  std::string digest;
};

inline DetData parse_det_json(const ojson& root, const std::string& where = "dets") {
  using namespace jsondetail;
  check_version(root, kDetFileVersion, where);
  DetData data;
  data.timeline = as_timeline(field(root, "timeline", where), where + "/timeline");
  const int T = data.timeline.horizon_steps;
  const auto& scenes = as_array(field(root, "scenes", where), where + "/scenes");
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const std::string sw = where + "/scenes/" + std::to_string(si);
    DetScene scene;
    scene.scene_id = as_string(field(scenes[si], "scene_id", sw), sw + "/scene_id");
    const auto& dets = as_array(field(scenes[si], "detections", sw), sw + "/detections");
    for (std::size_t di = 0; di < dets.size(); ++di) {
      const std::string dw = sw + "/detections/" + std::to_string(di);
      Detection det;
      det.box = as_box(field(dets[di], "box", dw), dw + "/box");
      det.score = score_in_unit_range(field(dets[di], "score", dw), dw + "/score");
      det.velocity = as_vec2(field(dets[di], "velocity", dw), dw + "/velocity");
      std::vector<Vec2> steps;
      if (auto it = dets[di].find("step_velocities"); it != dets[di].end() && !it->is_null()) {
        const auto& jsteps = as_array(*it, dw + "/step_velocities");
        if (static_cast<int>(jsteps.size()) != T) {
          throw IoError(dw + "/step_velocities: expected " + std::to_string(T) + " entries, got " +
                        std::to_string(jsteps.size()));
        }
        for (std::size_t k = 0; k < jsteps.size(); ++k) {
          steps.push_back(as_vec2(jsteps[k], dw + "/step_velocities/" + std::to_string(k)));
        }
      }
      scene.detections.push_back(det);
      scene.step_velocities.push_back(std::move(steps));
    }
    const auto& futs = as_array(field(scenes[si], "future_detections", sw), sw + "/future_detections");
    for (std::size_t fi = 0; fi < futs.size(); ++fi) {
      const std::string fw = sw + "/future_detections/" + std::to_string(fi);
      FutureDetection fd;
      fd.position = as_vec2(field(futs[fi], "position", fw), fw + "/position");
      fd.score = score_in_unit_range(field(futs[fi], "score", fw), fw + "/score");
      const auto& joffs = as_array(field(futs[fi], "back_offsets", fw), fw + "/back_offsets");
      if (static_cast<int>(joffs.size()) != T) {
        throw IoError(fw + "/back_offsets: expected " + std::to_string(T) + " entries, got " +
                      std::to_string(joffs.size()));
      }
      for (std::size_t k = 0; k < joffs.size(); ++k) {
        fd.back_offsets.push_back(as_vec2(joffs[k], fw + "/back_offsets/" + std::to_string(k)));
      }
      scene.future_detections.push_back(std::move(fd));
    }
    data.scenes.push_back(std::move(scene));
  }
  return data;
}

inline ojson det_to_json(const Timeline& tl, const std::vector<DetScene>& scenes) {
  using namespace jsondetail;
  ojson root{{"version", kDetFileVersion}, {"timeline", timeline_json(tl)}};
  ojson jscenes = ojson::array();
  for (const DetScene& scene : scenes) {
    ojson jdets = ojson::array();
    for (std::size_t i = 0; i < scene.detections.size(); ++i) {
      const Detection& det = scene.detections[i];
      ojson jd{{"box", box_json(det.box)}, {"score", det.score}, {"velocity", vec2_json(det.velocity)}};
      if (i < scene.step_velocities.size() && !scene.step_velocities[i].empty()) {
        ojson jsteps = ojson::array();
        for (const Vec2& v : scene.step_velocities[i]) jsteps.push_back(vec2_json(v));
        jd["step_velocities"] = std::move(jsteps);
      }
      jdets.push_back(std::move(jd));
    }
    ojson jfuts = ojson::array();
    for (const FutureDetection& fd : scene.future_detections) {
      ojson joffs = ojson::array();
      for (const Vec2& v : fd.back_offsets) joffs.push_back(vec2_json(v));
      jfuts.push_back(ojson{{"position", vec2_json(fd.position)},
                            {"score", fd.score},
                            {"back_offsets", std::move(joffs)}});
    }
    jscenes.push_back(ojson{{"scene_id", scene.scene_id},
                            {"detections", std::move(jdets)},
                            {"future_detections", std::move(jfuts)}});
  }
  root["scenes"] = std::move(jscenes);
  return root;
}

inline DetData load_dets(const std::string& path) {
  const std::string bytes = read_file(path);
  ojson root;
  try {
    root = ojson::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("det file '" + path + "': " + e.what());
  }
  DetData data = parse_det_json(root, "det file '" + path + "'");
  data.digest = digest_bytes(bytes);
  return data;
}

inline void save_dets(const std::string& path, const Timeline& tl,
                      const std::vector<DetScene>& scenes) {
  write_file(path, det_to_json(tl, scenes).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Config and report serialization

inline ojson config_to_json(const EvalConfig& cfg) {
  using namespace jsondetail;
  return ojson{{"timeline", timeline_json(cfg.timeline)},
               {"current_thresholds", cfg.current_thresholds},
               {"final_thresholds", cfg.final_thresholds},
               {"k", cfg.k},
               {"class_profile", profile_name(cfg.class_profile)},
               {"recall_levels", cfg.recall_levels},
               {"miss_fde_threshold", cfg.miss_fde_threshold},
               {"legacy_match_threshold", cfg.legacy_match_threshold},
               {"pr_points", cfg.pr_points},
               {"nuscenes_clip", cfg.nuscenes_clip},
               {"rank_by_forecast_score", cfg.rank_by_forecast_score}};
}

inline EvalConfig config_from_json(const ojson& j, const std::string& where = "config") {
  using namespace jsondetail;
  EvalConfig cfg;
  cfg.timeline = as_timeline(field(j, "timeline", where), where + "/timeline");
  cfg.current_thresholds = field(j, "current_thresholds", where).get<std::vector<double>>();
  cfg.final_thresholds = field(j, "final_thresholds", where).get<std::vector<double>>();
  cfg.k = as_int(field(j, "k", where), where + "/k");
  const std::string prof = as_string(field(j, "class_profile", where), where + "/class_profile");
  if (prof == "car") {
    cfg.class_profile = ClassProfile::kCar;
  } else if (prof == "pedestrian") {
    cfg.class_profile = ClassProfile::kPedestrian;
  } else {
    throw IoError(where + "/class_profile: unknown profile '" + prof + "'");
  }
  cfg.recall_levels = field(j, "recall_levels", where).get<std::vector<double>>();
  cfg.miss_fde_threshold = as_number(field(j, "miss_fde_threshold", where), where + "/miss_fde_threshold");
  cfg.legacy_match_threshold =
      as_number(field(j, "legacy_match_threshold", where), where + "/legacy_match_threshold");
  cfg.pr_points = as_int(field(j, "pr_points", where), where + "/pr_points");
  cfg.nuscenes_clip = field(j, "nuscenes_clip", where).get<bool>();
  cfg.rank_by_forecast_score = field(j, "rank_by_forecast_score", where).get<bool>();
  return cfg;
}

namespace jsondetail {

inline ojson opt_json(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

inline std::optional<double> opt_from_json(const ojson& j, const std::string& where) {
  if (j.is_null()) return std::nullopt;
  return as_number(j, where);
}

inline ojson levels_json(const std::vector<std::pair<double, std::optional<double>>>& levels) {
  ojson arr = ojson::array();
  for (const auto& [level, value] : levels) arr.push_back(ojson::array({level, opt_json(value)}));
  return arr;
}

inline std::vector<std::pair<double, std::optional<double>>> levels_from_json(
    const ojson& j, const std::string& where) {
  std::vector<std::pair<double, std::optional<double>>> out;
  for (std::size_t i = 0; i < as_array(j, where).size(); ++i) {
    const std::string lw = where + "/" + std::to_string(i);
    const auto& entry = as_array(j[i], lw);
    if (entry.size() != 2) throw IoError(lw + ": expected [level, value]");
    out.emplace_back(as_number(entry[0], lw + "/0"), opt_from_json(entry[1], lw + "/1"));
  }
  return out;
}

}  // namespace jsondetail

inline ojson report_to_json(const EvalReport& r) {
  using namespace jsondetail;
  ojson subclasses;
  for (int s = 0; s < kNumSubclasses; ++s) {
    subclasses[subclass_name(static_cast<MotionSubclass>(s))] =
        ojson{{"gt_count", r.subclasses[s].gt_count},
              {"ap_det", opt_json(r.subclasses[s].ap_det)},
              {"ap_f", opt_json(r.subclasses[s].ap_f)}};
  }
  ojson curves = ojson::array();
  for (const PrCurveEntry& c : r.pr_curves) {
    ojson pts = ojson::array();
    for (const auto& [rec, prec] : c.points) pts.push_back(ojson::array({rec, prec}));
    curves.push_back(ojson{{"subclass", subclass_name(c.subclass)},
                           {"tau_cur", c.tau_cur},
                           {"tau_fin", c.tau_fin},
                           {"points", std::move(pts)}});
  }
  return ojson{{"config", config_to_json(r.config)},
               {"inputs", ojson{{"gt_digest", r.gt_digest}, {"pred_digest", r.pred_digest}}},
               {"subclasses", std::move(subclasses)},
               {"map_det", r.map_det},
               {"map_f", r.map_f},
               {"legacy", ojson{{"ade_at_recall", levels_json(r.legacy.ade_at_recall)},
                                {"fde_at_recall", levels_json(r.legacy.fde_at_recall)},
                                {"ade_avg_recall", opt_json(r.legacy.ade_avg_recall)},
                                {"fde_avg_recall", opt_json(r.legacy.fde_avg_recall)},
                                {"miss_rate", opt_json(r.legacy.miss_rate)},
                                {"flags", r.legacy.flags}}},
               {"pr_curves", std::move(curves)},
               {"warnings", r.warnings}};
}

inline EvalReport report_from_json(const ojson& j, const std::string& where = "report") {
  using namespace jsondetail;
  EvalReport r;
  r.config = config_from_json(field(j, "config", where), where + "/config");
  const auto& inputs = field(j, "inputs", where);
  r.gt_digest = as_string(field(inputs, "gt_digest", where), where + "/inputs/gt_digest");
  r.pred_digest = as_string(field(inputs, "pred_digest", where), where + "/inputs/pred_digest");
  const auto& subclasses = field(j, "subclasses", where);
  for (int s = 0; s < kNumSubclasses; ++s) {
    const std::string name = subclass_name(static_cast<MotionSubclass>(s));
    const std::string sw = where + "/subclasses/" + name;
    const auto& js = field(subclasses, name.c_str(), sw);
    r.subclasses[s].gt_count = static_cast<std::size_t>(as_number(field(js, "gt_count", sw), sw + "/gt_count"));
    r.subclasses[s].ap_det = opt_from_json(field(js, "ap_det", sw), sw + "/ap_det");
    r.subclasses[s].ap_f = opt_from_json(field(js, "ap_f", sw), sw + "/ap_f");
  }
  r.map_det = as_number(field(j, "map_det", where), where + "/map_det");
  r.map_f = as_number(field(j, "map_f", where), where + "/map_f");
  const auto& legacy = field(j, "legacy", where);
  r.legacy.ade_at_recall = levels_from_json(field(legacy, "ade_at_recall", where), where + "/legacy/ade_at_recall");
  r.legacy.fde_at_recall = levels_from_json(field(legacy, "fde_at_recall", where), where + "/legacy/fde_at_recall");
  r.legacy.ade_avg_recall = opt_from_json(field(legacy, "ade_avg_recall", where), where + "/legacy/ade_avg_recall");
  r.legacy.fde_avg_recall = opt_from_json(field(legacy, "fde_avg_recall", where), where + "/legacy/fde_avg_recall");
  r.legacy.miss_rate = opt_from_json(field(legacy, "miss_rate", where), where + "/legacy/miss_rate");
  r.legacy.flags = field(legacy, "flags", where).get<std::vector<std::string>>();
  const auto& curves = as_array(field(j, "pr_curves", where), where + "/pr_curves");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const std::string cw = where + "/pr_curves/" + std::to_string(i);
    PrCurveEntry entry;
    const auto name = as_string(field(curves[i], "subclass", cw), cw + "/subclass");
    const auto sc = subclass_from_name(name);
    if (!sc) throw IoError(cw + "/subclass: unknown subclass '" + name + "'");
    entry.subclass = *sc;
    entry.tau_cur = as_number(field(curves[i], "tau_cur", cw), cw + "/tau_cur");
    entry.tau_fin = as_number(field(curves[i], "tau_fin", cw), cw + "/tau_fin");
    const auto& pts = as_array(field(curves[i], "points", cw), cw + "/points");
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const auto& pt = as_array(pts[p], cw + "/points/" + std::to_string(p));
      if (pt.size() != 2) throw IoError(cw + "/points: expected [recall, precision]");
      entry.points.emplace_back(as_number(pt[0], cw), as_number(pt[1], cw));
    }
    r.pr_curves.push_back(std::move(entry));
  }
  r.warnings = field(j, "warnings", where).get<std::vector<std::string>>();
  return r;
}

inline void save_report(const std::string& path, const EvalReport& r) {
  write_file(path, report_to_json(r).dump(2) + "\n");
}

inline EvalReport load_report(const std::string& path) {
  ojson root;
  try {
    root = ojson::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("report file '" + path + "': " + e.what());
  }
  return report_from_json(root, "report file '" + path + "'");
}

// One CSV per (subclass, threshold pair): header `recall,precision`.
inline void write_pr_csvs(const EvalReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const PrCurveEntry& c : r.pr_curves) {
    char name[128];
    std::snprintf(name, sizeof(name), "pr_%s_cur%g_fin%g.csv", subclass_name(c.subclass), c.tau_cur,
                  c.tau_fin);
    std::ostringstream ss;
    ss << "recall,precision\n";
    for (const auto& [rec, prec] : c.points) {
      ss << ojson(rec).dump() << "," << ojson(prec).dump() << "\n";
    }
    write_file((std::filesystem::path(dir) / name).string(), ss.str());
  }
}

// ---------------------------------------------------------------------------
// Synth / breakdown configuration files (all fields optional, defaults apply)

inline SceneSamplerParams sampler_from_json(const ojson& j, const std::string& where) {
  using namespace jsondetail;
  SceneSamplerParams p;
  if (auto it = j.find("mixture"); it != j.end()) {
    const std::string mw = where + "/mixture";
    p.mixture[0] = as_number(field(*it, "static", mw), mw + "/static");
    p.mixture[1] = as_number(field(*it, "linear", mw), mw + "/linear");
    p.mixture[2] = as_number(field(*it, "non_linear", mw), mw + "/non_linear");
  }
  auto num = [&](const char* key, double& slot) {
    if (auto it = j.find(key); it != j.end()) slot = as_number(*it, where + "/" + key);
  };
  auto integer = [&](const char* key, int& slot) {
    if (auto it = j.find(key); it != j.end()) slot = as_int(*it, where + "/" + key);
  };
  auto range = [&](const char* key, std::array<double, 2>& slot) {
    if (auto it = j.find(key); it != j.end()) {
      const auto& arr = as_array(*it, where + "/" + key);
      if (arr.size() != 2) throw IoError(where + "/" + key + ": expected [lo, hi]");
      slot = {as_number(arr[0], where), as_number(arr[1], where)};
    }
  };
  integer("agents_min", p.agents_min);
  integer("agents_max", p.agents_max);
  num("extent", p.extent);
  num("spawn_margin", p.spawn_margin);
  num("min_separation", p.min_separation);
  range("speed_range", p.speed_range);
  range("turn_rate_range", p.turn_rate_range);
  range("length_range", p.length_range);
  range("width_range", p.width_range);
  return p;
}

inline NoiseModel noise_from_json(const ojson& j, const std::string& where) {
  using namespace jsondetail;
  NoiseModel n;
  auto num = [&](const char* key, double& slot) {
    if (auto it = j.find(key); it != j.end()) slot = as_number(*it, where + "/" + key);
  };
  num("pos_sigma", n.pos_sigma);
  num("vel_sigma", n.vel_sigma);
  num("drop_prob", n.drop_prob);
  num("clutter_rate", n.clutter_rate);
  num("score_jitter", n.score_jitter);
  if (auto it = j.find("clutter_score_range"); it != j.end()) {
    const auto& arr = as_array(*it, where + "/clutter_score_range");
    if (arr.size() != 2) throw IoError(where + "/clutter_score_range: expected [lo, hi]");
    n.clutter_score_range = {as_number(arr[0], where), as_number(arr[1], where)};
  }
  return n;
}

inline SynthConfig synth_config_from_json(const ojson& j, const std::string& where = "config") {
  using namespace jsondetail;
  SynthConfig cfg;
  if (auto it = j.find("n_scenes"); it != j.end()) cfg.n_scenes = as_int(*it, where + "/n_scenes");
  if (auto it = j.find("timeline"); it != j.end()) cfg.timeline = as_timeline(*it, where + "/timeline");
  if (auto it = j.find("sampler"); it != j.end()) cfg.sampler = sampler_from_json(*it, where + "/sampler");
  if (auto it = j.find("noise"); it != j.end()) cfg.noise = noise_from_json(*it, where + "/noise");
  return cfg;
}

inline BreakdownConfig breakdown_config_from_json(const ojson& j, const std::string& where = "config") {
  using namespace jsondetail;
  BreakdownConfig cfg;
  if (auto it = j.find("synth"); it != j.end()) {
    cfg.synth = synth_config_from_json(*it, where + "/synth");
  } else {
    cfg.synth = synth_config_from_json(j, where);  // flat layout also accepted
  }
  if (auto it = j.find("k"); it != j.end()) cfg.k = as_int(*it, where + "/k");
  if (auto it = j.find("stationarity"); it != j.end()) {
    const std::string sw = where + "/stationarity";
    if (auto r = it->find("overlap_radius"); r != it->end()) {
      cfg.stationarity_overlap_radius = as_number(*r, sw + "/overlap_radius");
    }
    if (auto r = it->find("moving_penalty"); r != it->end()) {
      cfg.stationarity_moving_penalty = as_number(*r, sw + "/moving_penalty");
    }
  }
  return cfg;
}

inline ojson breakdown_to_json(const BreakdownTable& t) {
  using namespace jsondetail;
  ojson rows = ojson::array();
  for (const BreakdownRow& row : t.rows) {
    rows.push_back(ojson{{"method", row.method},
                         {"ap_f", ojson{{"static", opt_json(row.ap_f[0])},
                                        {"linear", opt_json(row.ap_f[1])},
                                        {"non_linear", opt_json(row.ap_f[2])}}},
                         {"map_f", row.map_f},
                         {"ade_avg_recall", opt_json(row.legacy.ade_avg_recall)},
                         {"fde_avg_recall", opt_json(row.legacy.fde_avg_recall)},
                         {"ade_at_recall", levels_json(row.legacy.ade_at_recall)},
                         {"fde_at_recall", levels_json(row.legacy.fde_at_recall)},
                         {"miss_rate", opt_json(row.legacy.miss_rate)}});
  }
  return ojson{{"population", ojson{{"static", t.gt_counts[0]},
                                    {"linear", t.gt_counts[1]},
                                    {"non_linear", t.gt_counts[2]},
                                    {"mean_agent_speed", t.mean_agent_speed},
                                    {"median_agent_speed", t.median_agent_speed},
                                    {"vel_sigma", t.vel_sigma}}},
               {"rows", std::move(rows)}};
}

}  // namespace foreval
