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

// Test-only reference implementations, deliberately independent of the
// library's computation paths: IoU by area sampling, AP by enumerating every
// ranked prefix straight from the definition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "foreval/matching.hpp"
#include "foreval/metrics.hpp"
#include "foreval/rng.hpp"
#include "foreval/types.hpp"

namespace foreval::oracles {

inline bool point_in_box(const Vec2& p, const BevBox& b) {
  const Vec2 d = p - b.center();
  const Vec2 axis{std::cos(b.yaw), std::sin(b.yaw)};
  const double lx = dot(d, axis);
  const double ly = cross(axis, d);
  return std::abs(lx) <= b.length * 0.5 && std::abs(ly) <= b.width * 0.5;
}

struct McIou {
  double value = 0.0;
  double sigma = 0.0;  // binomial sigma conditioned on union hits
};

// Uniform sampling over the joint bounding box of the pair.
inline McIou mc_iou(const BevBox& a, const BevBox& b, std::size_t samples, std::uint64_t seed) {
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const BevBox* box : {&a, &b}) {
    const double r = 0.5 * std::hypot(box->length, box->width);
    min_x = std::min(min_x, box->cx - r);
    max_x = std::max(max_x, box->cx + r);
    min_y = std::min(min_y, box->cy - r);
    max_y = std::max(max_y, box->cy + r);
  }
  Rng rng(seed);
  std::size_t in_union = 0, in_inter = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec2 p{rng.uniform(min_x, max_x), rng.uniform(min_y, max_y)};
    const bool ia = point_in_box(p, a);
    const bool ib = point_in_box(p, b);
    if (ia || ib) ++in_union;
    if (ia && ib) ++in_inter;
  }
  McIou out;
  if (in_union == 0) return out;
  out.value = static_cast<double>(in_inter) / static_cast<double>(in_union);
  out.sigma = std::sqrt(std::max(out.value * (1.0 - out.value), 0.0) /
                        static_cast<double>(in_union));
  return out;
}

// AP straight from the definition: for every grid recall level, the max
// precision over all ranked prefixes achieving at least that recall, with
// per-prefix counts recomputed from scratch.
inline double brute_force_ap(const std::vector<bool>& ranked_hits, std::size_t gt_count,
                             int pr_points) {
  const std::size_t n = ranked_hits.size();
  double sum = 0.0;
  for (int g = 0; g < pr_points; ++g) {
    const double level = static_cast<double>(g) / (pr_points - 1);
    double best = 0.0;
    for (std::size_t prefix = 1; prefix <= n; ++prefix) {
      std::size_t tp = 0;
      for (std::size_t i = 0; i < prefix; ++i) tp += ranked_hits[i] ? 1 : 0;
      const double recall = static_cast<double>(tp) / static_cast<double>(gt_count);
      if (recall >= level) {
        best = std::max(best, static_cast<double>(tp) / static_cast<double>(prefix));
      }
    }
    sum += best;
  }
  return sum / pr_points;
}

inline std::vector<bool> ranked_hits(const std::vector<MatchRecord>& sorted_records,
                                     HitField field) {
  std::vector<bool> hits;
  hits.reserve(sorted_records.size());
  for (const MatchRecord& r : sorted_records) {
    hits.push_back(field == HitField::kCurrent ? r.current_hit : r.forecast_hit);
  }
  return hits;
}

inline BevBox random_box(Rng& rng, double span = 10.0) {
  return BevBox::make(rng.uniform(-span, span), rng.uniform(-span, span), rng.uniform(0.5, 6.0),
                      rng.uniform(0.5, 6.0), rng.uniform(-M_PI, M_PI));
}

}  // namespace foreval::oracles
