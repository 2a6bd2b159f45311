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

#include <string>
#include <utility>
#include <vector>

#include "foreval/subclass.hpp"
#include "foreval/types.hpp"

namespace foreval::fixtures {

inline const Timeline kTimeline{0, 6, 0.5};

// Complete constant-velocity ground truth (static when velocity is zero).
inline GtTrajectory gt_cv(const std::string& id, Vec2 start, Vec2 velocity,
                          const Timeline& tl = kTimeline, int last_offset = -1) {
  GtTrajectory traj;
  traj.instance_id = id;
  const int last = last_offset < 0 ? tl.horizon_steps : last_offset;
  for (int t = 0; t <= last; ++t) {
    const Vec2 p = start + velocity * (t * tl.dt);
    traj.boxes.push_back({t, BevBox::make(p.x, p.y, 4.0, 2.0, 0.0)});
  }
  traj.velocity0 = velocity;
  return finalize_trajectory(std::move(traj), tl);
}

// Complete constant-turn-rate ground truth (non-linear for sharp-enough arcs).
inline GtTrajectory gt_arc(const std::string& id, Vec2 start, double speed, double turn_rate,
                           const Timeline& tl = kTimeline) {
  GtTrajectory traj;
  traj.instance_id = id;
  const double r = speed / turn_rate;
  for (int t = 0; t <= tl.horizon_steps; ++t) {
    const double h = turn_rate * t * tl.dt;
    const Vec2 p = start + Vec2{r * std::sin(h), r * (1.0 - std::cos(h))};
    traj.boxes.push_back({t, BevBox::make(p.x, p.y, 4.0, 2.0, normalize_angle(h))});
  }
  traj.velocity0 = Vec2{speed, 0.0};
  return finalize_trajectory(std::move(traj), tl);
}

// Single-candidate prediction moving linearly from anchor to endpoint.
inline ForecastSet pred_to(Vec2 anchor, Vec2 endpoint, double det_score,
                           double forecast_score = -1.0, const Timeline& tl = kTimeline) {
  ForecastSet fs;
  fs.anchor = BevBox::make(anchor.x, anchor.y, 4.0, 2.0, 0.0);
  fs.det_score = det_score;
  ForecastCandidate cand;
  for (int t = 1; t <= tl.horizon_steps; ++t) {
    const double frac = static_cast<double>(t) / tl.horizon_steps;
    cand.waypoints.push_back(anchor + (endpoint - anchor) * frac);
  }
  cand.forecast_score = forecast_score < 0.0 ? det_score : forecast_score;
  fs.candidates.push_back(std::move(cand));
  return fs;
}

// Prediction that exactly reproduces a complete GT trajectory.
inline ForecastSet pred_oracle(const GtTrajectory& gt, double score,
                               const Timeline& tl = kTimeline) {
  ForecastSet fs;
  fs.anchor = gt.first_box();
  fs.det_score = score;
  ForecastCandidate cand;
  for (int t = 1; t <= tl.horizon_steps; ++t) cand.waypoints.push_back(gt.boxes[t].box.center());
  cand.forecast_score = score;
  fs.candidates.push_back(std::move(cand));
  return fs;
}

inline std::vector<GtScene> one_gt_scene(std::vector<GtTrajectory> trajs,
                                         const std::string& id = "s0") {
  return {GtScene{id, std::move(trajs)}};
}

inline std::vector<PredScene> one_pred_scene(std::vector<ForecastSet> preds,
                                             const std::string& id = "s0") {
  return {PredScene{id, std::move(preds)}};
}

}  // namespace foreval::fixtures
