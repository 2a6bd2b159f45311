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
#include <vector>

#include "foreval/types.hpp"

namespace foreval {

enum class ClassProfile { kCar, kPedestrian };

inline const char* profile_name(ClassProfile p) {
  return p == ClassProfile::kCar ? "car" : "pedestrian";
}

// Evaluation settings. Distance thresholds are evaluated as ordered pairs:
// current_thresholds[i] gates the current-frame match and final_thresholds[i]
// gates the final-frame (forecast) match of the same pass.
struct EvalConfig {
  Timeline timeline;
  std::vector<double> current_thresholds;
  std::vector<double> final_thresholds;
  int k = 1;
  ClassProfile class_profile = ClassProfile::kCar;

  // Legacy displacement metrics.
  std::vector<double> recall_levels = {0.6, 0.9};
  double miss_fde_threshold = 2.0;
  double legacy_match_threshold = 2.0;

  // PR integration.
  int pr_points = 101;
  bool nuscenes_clip = false;

  // When set, PR ordering uses the selected candidate's forecast score
  // instead of the anchor detection score. Off by default.
  bool rank_by_forecast_score = false;

  static EvalConfig for_profile(ClassProfile p, Timeline tl = {}, int k = 1) {
    EvalConfig cfg;
    cfg.timeline = tl;
    cfg.k = k;
    cfg.class_profile = p;
    if (p == ClassProfile::kCar) {
      cfg.current_thresholds = {0.5, 1.0, 2.0, 4.0};
      cfg.final_thresholds = {1.0, 2.0, 4.0, 8.0};
    } else {
      cfg.current_thresholds = {0.125, 0.25, 0.5, 1.0};
      cfg.final_thresholds = {0.25, 0.5, 1.0, 2.0};
    }
    return cfg;
  }

  bool operator==(const EvalConfig&) const = default;
};

// Returns the config unchanged iff every invariant holds.
inline EvalConfig validate_config(EvalConfig cfg) {
  cfg.timeline.validate();
  if (cfg.current_thresholds.empty() ||
      cfg.current_thresholds.size() != cfg.final_thresholds.size()) {
    throw ValidationError("EvalConfig: current/final threshold lists must have equal, non-zero length");
  }
  for (double t : cfg.current_thresholds) {
    if (!(t > 0.0)) throw ValidationError("EvalConfig: current thresholds must be > 0");
  }
  for (double t : cfg.final_thresholds) {
    if (!(t > 0.0)) throw ValidationError("EvalConfig: final thresholds must be > 0");
  }
  if (cfg.k < 1) throw ValidationError("EvalConfig: k must be >= 1");
  if (cfg.recall_levels.empty()) throw ValidationError("EvalConfig: recall_levels must be non-empty");
  for (double r : cfg.recall_levels) {
    if (!(r > 0.0) || r > 1.0) throw ValidationError("EvalConfig: recall levels must lie in (0,1]");
  }
  if (!(cfg.miss_fde_threshold > 0.0)) throw ValidationError("EvalConfig: miss_fde_threshold must be > 0");
  if (!(cfg.legacy_match_threshold > 0.0)) throw ValidationError("EvalConfig: legacy_match_threshold must be > 0");
  if (cfg.pr_points < 2) throw ValidationError("EvalConfig: pr_points must be >= 2");
  return cfg;
}

}  // namespace foreval
