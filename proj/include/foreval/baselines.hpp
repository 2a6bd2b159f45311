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

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "foreval/geometry.hpp"
#include "foreval/types.hpp"

// Geometric forecasters that turn detections into ForecastSets, plus the
// backcast assembler that attaches future-frame detections to current-frame
// anchors.

namespace foreval {

// Current-frame detector output: box, confidence, and a one-frame velocity
// estimate.
struct Detection {
  BevBox box;
  double score = 0.0;
  Vec2 velocity;

  void validate() const {
    if (score < 0.0 || score > 1.0) throw ValidationError("Detection: score outside [0,1]");
  }
};

// A detection at the final future offset together with backward step
// displacements: back_offsets[j] moves offset T-j to offset T-j-1, so the
// chain ends at the current frame after T steps.
struct FutureDetection {
  Vec2 position;
  double score = 0.0;
  std::vector<Vec2> back_offsets;
};

// All T waypoints sit on the anchor center.
inline std::vector<ForecastSet> constant_position(const std::vector<Detection>& dets,
                                                  const Timeline& tl) {
  std::vector<ForecastSet> out;
  out.reserve(dets.size());
  for (const Detection& d : dets) {
    d.validate();
    ForecastCandidate cand;
    cand.waypoints.assign(tl.horizon_steps, d.box.center());
    cand.forecast_score = d.score;
    out.push_back(ForecastSet{d.box, d.score, {std::move(cand)}});
  }
  return out;
}

// waypoint_t = anchor + velocity * t * dt.
inline std::vector<ForecastSet> constant_velocity(const std::vector<Detection>& dets,
                                                  const Timeline& tl) {
  std::vector<ForecastSet> out;
  out.reserve(dets.size());
  for (const Detection& d : dets) {
    d.validate();
    ForecastCandidate cand;
    cand.waypoints.reserve(tl.horizon_steps);
    for (int t = 1; t <= tl.horizon_steps; ++t) {
      cand.waypoints.push_back(d.box.center() + d.velocity * (t * tl.dt));
    }
    cand.forecast_score = d.score;
    out.push_back(ForecastSet{d.box, d.score, {std::move(cand)}});
  }
  return out;
}

// Integrates one velocity per step forward from the anchor:
// waypoint_t = waypoint_{t-1} + v_t * dt.
inline std::vector<ForecastSet> forward_integrate(
    const std::vector<Detection>& dets, const std::vector<std::vector<Vec2>>& step_velocities,
    const Timeline& tl) {
  if (step_velocities.size() != dets.size()) {
    throw ValidationError("forward_integrate: one velocity sequence required per detection");
  }
  std::vector<ForecastSet> out;
  out.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    dets[i].validate();
    if (static_cast<int>(step_velocities[i].size()) != tl.horizon_steps) {
      throw ValidationError("forward_integrate: detection " + std::to_string(i) +
                            " needs exactly horizon_steps step velocities");
    }
    ForecastCandidate cand;
    cand.waypoints.reserve(tl.horizon_steps);
    Vec2 pos = dets[i].box.center();
    for (int t = 1; t <= tl.horizon_steps; ++t) {
      pos = pos + step_velocities[i][t - 1] * tl.dt;
      cand.waypoints.push_back(pos);
    }
    cand.forecast_score = dets[i].score;
    out.push_back(ForecastSet{dets[i].box, dets[i].score, {std::move(cand)}});
  }
  return out;
}

struct BackcastResult {
  std::vector<ForecastSet> forecasts;
  std::size_t discarded = 0;  // future detections with no anchor within reach
};

// Integrates each future detection's back offsets down to the current frame,
// attaches the chain to the nearest current detection (many-to-one, unbounded
// by default), and groups chains per anchor into multi-candidate ForecastSets
// ranked by the future detection's score. Chains are kept as integrated; the
// offset-0 endpoint is not snapped onto the anchor.
inline BackcastResult backcast_assemble(const std::vector<Detection>& current_dets,
                                        const std::vector<FutureDetection>& future_dets,
                                        const Timeline& tl,
                                        double max_anchor_radius = std::numeric_limits<double>::infinity()) {
  BackcastResult result;
  if (current_dets.empty()) {
    result.discarded = future_dets.size();
    return result;
  }
  for (const Detection& d : current_dets) d.validate();

  // candidates grouped by anchor index
  std::map<std::size_t, std::vector<ForecastCandidate>> groups;
  for (const FutureDetection& fd : future_dets) {
    if (static_cast<int>(fd.back_offsets.size()) != tl.horizon_steps) {
      throw ValidationError("backcast_assemble: back_offsets size != horizon_steps");
    }
    if (fd.score < 0.0 || fd.score > 1.0) {
      throw ValidationError("backcast_assemble: score outside [0,1]");
    }
    // positions at offsets T..0
    std::vector<Vec2> chain(tl.horizon_steps + 1);
    chain[tl.horizon_steps] = fd.position;
    for (int j = 0; j < tl.horizon_steps; ++j) {
      chain[tl.horizon_steps - j - 1] = chain[tl.horizon_steps - j] + fd.back_offsets[j];
    }
    std::size_t best = current_dets.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < current_dets.size(); ++i) {
      const double d = center_distance(chain.front(), current_dets[i].box.center());
      if (d < best_d) {
        best = i;
        best_d = d;
      }
    }
    if (best_d > max_anchor_radius) {
      ++result.discarded;
      continue;
    }
    ForecastCandidate cand;
    cand.waypoints.assign(chain.begin() + 1, chain.end());
    cand.forecast_score = fd.score;
    groups[best].push_back(std::move(cand));
  }

  for (auto& [anchor_idx, candidates] : groups) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const ForecastCandidate& a, const ForecastCandidate& b) {
                       return a.forecast_score > b.forecast_score;
                     });
    result.forecasts.push_back(ForecastSet{current_dets[anchor_idx].box,
                                           current_dets[anchor_idx].score, std::move(candidates)});
  }
  return result;
}

// Score transform that games recall-prefix metrics: detections judged
// stationary keep their score, everything else is demoted multiplicatively.
// A detection counts as stationary when some future detection lies within
// overlap_radius of its center, i.e. the final position overlaps the initial
// one.
inline std::vector<Detection> stationarity_rerank(std::vector<Detection> dets,
                                                  const std::vector<FutureDetection>& future_dets,
                                                  double overlap_radius, double moving_penalty) {
  for (Detection& d : dets) {
    bool stationary = false;
    for (const FutureDetection& fd : future_dets) {
      if (center_distance(d.box.center(), fd.position) <= overlap_radius) {
        stationary = true;
        break;
      }
    }
    if (!stationary) d.score *= moving_penalty;
  }
  return dets;
}

}  // namespace foreval
