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

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core value types shared by every other header. All of them are immutable
// after construction and safe to share across threads.

namespace foreval {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// Wraps an angle to (-pi, pi].
inline double normalize_angle(double rad) {
  double a = std::remainder(rad, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

// Oriented bird's-eye-view bounding box. `length` runs along the yaw axis,
// `width` across it. Yaw is kept normalized to (-pi, pi].
struct BevBox {
  double cx = 0.0;
  double cy = 0.0;
  double length = 1.0;
  double width = 1.0;
  double yaw = 0.0;

  static BevBox make(double cx, double cy, double length, double width, double yaw) {
    if (!(length > 0.0) || !(width > 0.0)) {
      throw ValidationError("BevBox: length and width must be > 0");
    }
    return BevBox{cx, cy, length, width, normalize_angle(yaw)};
  }

  Vec2 center() const { return {cx, cy}; }
  double footprint_area() const { return length * width; }
  bool operator==(const BevBox&) const = default;
};

// Frame indexing for one evaluation: offset 0 is the current frame, offsets
// 1..horizon_steps are the forecast horizon.
struct Timeline {
  std::int64_t t_obs_index = 0;
  int horizon_steps = 6;
  double dt = 0.5;

  double horizon_seconds() const { return horizon_steps * dt; }
  bool operator==(const Timeline&) const = default;

  void validate() const {
    if (horizon_steps < 1) throw ValidationError("Timeline: horizon_steps must be >= 1");
    if (!(dt > 0.0)) throw ValidationError("Timeline: dt must be > 0");
  }
};

enum class MotionSubclass { kStatic = 0, kLinear = 1, kNonLinear = 2 };
inline constexpr int kNumSubclasses = 3;

inline const char* subclass_name(MotionSubclass s) {
  switch (s) {
    case MotionSubclass::kStatic: return "static";
    case MotionSubclass::kLinear: return "linear";
    case MotionSubclass::kNonLinear: return "non_linear";
  }
  return "?";
}

inline std::optional<MotionSubclass> subclass_from_name(const std::string& name) {
  if (name == "static") return MotionSubclass::kStatic;
  if (name == "linear") return MotionSubclass::kLinear;
  if (name == "non_linear") return MotionSubclass::kNonLinear;
  return std::nullopt;
}

struct TimedBox {
  int offset = 0;
  BevBox box;
  bool operator==(const TimedBox&) const = default;
};

// One ground-truth instance over the horizon. `boxes` holds the annotated
// frames (offset 0 always present, offsets strictly increasing). `complete`
// is true iff an annotation exists at every offset 0..=T; incomplete
// trajectories are ignore targets during matching.
struct GtTrajectory {
  std::string instance_id;
  std::vector<TimedBox> boxes;
  std::optional<Vec2> velocity0;
  MotionSubclass subclass = MotionSubclass::kStatic;
  bool complete = false;

  const BevBox& first_box() const { return boxes.front().box; }
  const TimedBox& last_timed_box() const { return boxes.back(); }

  std::optional<Vec2> center_at(int offset) const {
    for (const auto& tb : boxes) {
      if (tb.offset == offset) return tb.box.center();
      if (tb.offset > offset) break;
    }
    return std::nullopt;
  }

  void validate(const Timeline& tl) const {
    if (boxes.empty() || boxes.front().offset != 0) {
      throw ValidationError("GtTrajectory '" + instance_id + "': offset 0 box required");
    }
    for (std::size_t i = 1; i < boxes.size(); ++i) {
      if (boxes[i].offset <= boxes[i - 1].offset) {
        throw ValidationError("GtTrajectory '" + instance_id + "': offsets must be strictly increasing");
      }
    }
    if (boxes.back().offset > tl.horizon_steps) {
      throw ValidationError("GtTrajectory '" + instance_id + "': offset exceeds horizon");
    }
  }

  bool operator==(const GtTrajectory&) const = default;
};

// One hypothesized future trajectory: positions at offsets 1..=T.
struct ForecastCandidate {
  std::vector<Vec2> waypoints;
  double forecast_score = 0.0;
  bool operator==(const ForecastCandidate&) const = default;
};

// A current-frame anchor detection plus one or more candidate futures.
struct ForecastSet {
  BevBox anchor;
  double det_score = 0.0;
  std::vector<ForecastCandidate> candidates;

  void validate(const Timeline& tl) const {
    if (candidates.empty()) throw ValidationError("ForecastSet: candidates must be non-empty");
    if (det_score < 0.0 || det_score > 1.0) {
      throw ValidationError("ForecastSet: det_score outside [0,1]");
    }
    for (const auto& c : candidates) {
      if (static_cast<int>(c.waypoints.size()) != tl.horizon_steps) {
        throw ValidationError("ForecastSet: candidate waypoint count != horizon_steps");
      }
      if (c.forecast_score < 0.0 || c.forecast_score > 1.0) {
        throw ValidationError("ForecastSet: forecast_score outside [0,1]");
      }
    }
  }

  bool operator==(const ForecastSet&) const = default;
};

struct GtScene {
  std::string scene_id;
  std::vector<GtTrajectory> trajectories;
  bool operator==(const GtScene&) const = default;
};

struct PredScene {
  std::string scene_id;
  std::vector<ForecastSet> forecasts;
  bool operator==(const PredScene&) const = default;
};

}  // namespace foreval
