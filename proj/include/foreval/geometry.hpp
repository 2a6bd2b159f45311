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
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "foreval/types.hpp"

// Exact 2D primitives for BEV matching: center distance, convex clipping,
// rotated-rectangle IoU. Everything here is a pure function in double
// precision.

namespace foreval {

// Intersections with area at or below this are treated as empty, so
// edge-touching boxes have IoU 0 and classify as non-overlapping.
inline constexpr double kAreaEpsilon = 1e-12;  // m^2

// Convex polygon, vertices in counter-clockwise order.
struct Polygon2 {
  std::vector<Vec2> vertices;

  double area() const {
    double twice = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      twice += cross(vertices[i], vertices[(i + 1) % n]);
    }
    return 0.5 * twice;
  }
};

inline double center_distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }
inline double center_distance(const BevBox& a, const BevBox& b) {
  return center_distance(a.center(), b.center());
}
inline double center_distance(const BevBox& a, const Vec2& b) {
  return center_distance(a.center(), b);
}
inline double center_distance(const Vec2& a, const BevBox& b) {
  return center_distance(a, b.center());
}

// Corners in counter-clockwise order.
inline std::array<Vec2, 4> box_corners(const BevBox& b) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const Vec2 u{c * b.length * 0.5, s * b.length * 0.5};
  const Vec2 v{-s * b.width * 0.5, c * b.width * 0.5};
  const Vec2 ctr = b.center();
  return {ctr + u + v, ctr - u + v, ctr - u - v, ctr + u - v};
}

inline Polygon2 box_polygon(const BevBox& b) {
  const auto corners = box_corners(b);
  return Polygon2{{corners.begin(), corners.end()}};
}

// Sutherland-Hodgman intersection of two convex CCW polygons. Returns
// nullopt when the intersection is empty or degenerate (area <= epsilon).
inline std::optional<Polygon2> clip_convex(const Polygon2& subject, const Polygon2& clip) {
  std::vector<Vec2> poly = subject.vertices;
  const auto& cv = clip.vertices;
  for (std::size_t i = 0; i < cv.size() && !poly.empty(); ++i) {
    const Vec2 a = cv[i];
    const Vec2 edge = cv[(i + 1) % cv.size()] - a;
    std::vector<Vec2> out;
    out.reserve(poly.size() + 1);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      const Vec2 p = poly[j];
      const Vec2 q = poly[(j + 1) % poly.size()];
      const double side_p = cross(edge, p - a);
      const double side_q = cross(edge, q - a);
      if (side_p >= 0.0) out.push_back(p);
      if ((side_p > 0.0 && side_q < 0.0) || (side_p < 0.0 && side_q > 0.0)) {
        const double t = side_p / (side_p - side_q);
        out.push_back(p + (q - p) * t);
      }
    }
    poly = std::move(out);
  }
  if (poly.size() < 3) return std::nullopt;
  Polygon2 result{std::move(poly)};
  if (result.area() <= kAreaEpsilon) return std::nullopt;
  return result;
}

// Rotated-rectangle intersection-over-union via convex clipping.
inline double bev_iou(const BevBox& a, const BevBox& b) {
  const auto inter = clip_convex(box_polygon(a), box_polygon(b));
  if (!inter) return 0.0;
  const double ia = inter->area();
  if (ia <= kAreaEpsilon) return 0.0;
  const double ua = a.footprint_area() + b.footprint_area() - ia;
  return std::clamp(ia / ua, 0.0, 1.0);
}

}  // namespace foreval
