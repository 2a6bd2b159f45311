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

#include <optional>
#include <utility>

#include "foreval/geometry.hpp"
#include "foreval/types.hpp"

// Motion subclass derivation. A trajectory is
//   static     when its first and last boxes overlap (IoU > 0),
//   linear     when a constant-velocity target box (first box translated by
//              velocity0 * elapsed, same size and yaw) overlaps the last box,
//   non-linear otherwise.
// The same rule labels ground truth and unmatched predictions, so false
// positives land in a subclass without requiring predicted labels.

namespace foreval {

inline MotionSubclass derive_subclass(const BevBox& first, const BevBox& last,
                                      const std::optional<Vec2>& velocity0,
                                      double elapsed_seconds) {
  if (bev_iou(first, last) > 0.0) return MotionSubclass::kStatic;
  const Vec2 v = velocity0.value_or(Vec2{0.0, 0.0});
  BevBox target = first;
  target.cx += v.x * elapsed_seconds;
  target.cy += v.y * elapsed_seconds;
  if (bev_iou(target, last) > 0.0) return MotionSubclass::kLinear;
  return MotionSubclass::kNonLinear;
}

// Velocity fallback for ground truth without a velocity annotation: the
// finite difference between offsets 0 and 1, or zero when offset 1 is also
// missing (which forces Static or NonLinear).
inline Vec2 trajectory_velocity0(const GtTrajectory& traj, const Timeline& tl) {
  if (traj.velocity0) return *traj.velocity0;
  if (traj.boxes.size() > 1 && traj.boxes[1].offset == 1) {
    return (traj.boxes[1].box.center() - traj.boxes[0].box.center()) * (1.0 / tl.dt);
  }
  return Vec2{0.0, 0.0};
}

inline MotionSubclass derive_trajectory_subclass(const GtTrajectory& traj, const Timeline& tl) {
  const BevBox& first = traj.boxes.front().box;
  const TimedBox& last = traj.boxes.back();
  const double elapsed = last.offset * tl.dt;
  return derive_subclass(first, last.box, trajectory_velocity0(traj, tl), elapsed);
}

// Labels a candidate future the way ground truth is labeled: the anchor box
// stands in for the first box, and a synthetic last box (anchor size and yaw
// at the final waypoint) stands in for the last. velocity0 is the first-step
// finite difference.
inline MotionSubclass derive_prediction_subclass(const ForecastSet& fs,
                                                 std::size_t candidate_index,
                                                 const Timeline& tl) {
  const ForecastCandidate& cand = fs.candidates.at(candidate_index);
  BevBox last = fs.anchor;
  last.cx = cand.waypoints.back().x;
  last.cy = cand.waypoints.back().y;
  const Vec2 v0 = (cand.waypoints.front() - fs.anchor.center()) * (1.0 / tl.dt);
  return derive_subclass(fs.anchor, last, v0, tl.horizon_seconds());
}

// Fills the derived fields (subclass, complete) of a trajectory. Safe to
// call repeatedly; derivation is a pure function of boxes and velocity0.
inline GtTrajectory finalize_trajectory(GtTrajectory traj, const Timeline& tl) {
  traj.validate(tl);
  traj.subclass = derive_trajectory_subclass(traj, tl);
  traj.complete = traj.boxes.size() == static_cast<std::size_t>(tl.horizon_steps) + 1 &&
                  traj.boxes.back().offset == tl.horizon_steps;
  return traj;
}

}  // namespace foreval
