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

#include <array>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "foreval/config.hpp"
#include "foreval/types.hpp"

namespace foreval {

// Legacy displacement metrics at fixed recall levels, their recall-averaged
// variants, and the miss rate. Values are nullopt when no true positive
// exists to measure. `flags` records recall levels that were unattainable.
struct LegacyMetrics {
  std::vector<std::pair<double, std::optional<double>>> ade_at_recall;
  std::vector<std::pair<double, std::optional<double>>> fde_at_recall;
  std::optional<double> ade_avg_recall;
  std::optional<double> fde_avg_recall;
  std::optional<double> miss_rate;
  std::vector<std::string> flags;
  bool operator==(const LegacyMetrics&) const = default;
};

struct SubclassResult {
  std::size_t gt_count = 0;
  std::optional<double> ap_det;  // nullopt iff gt_count == 0 (undefined, never silently 0)
  std::optional<double> ap_f;
  bool operator==(const SubclassResult&) const = default;
};

// Forecast PR curve for one (subclass, threshold pair): max-interpolated
// precision sampled on the fixed recall grid.
struct PrCurveEntry {
  MotionSubclass subclass = MotionSubclass::kStatic;
  double tau_cur = 0.0;
  double tau_fin = 0.0;
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  bool operator==(const PrCurveEntry&) const = default;
};

struct EvalReport {
  EvalConfig config;
  std::string gt_digest;
  std::string pred_digest;
  std::array<SubclassResult, kNumSubclasses> subclasses;  // static, linear, non_linear
  double map_det = 0.0;  // mean of the defined per-subclass values
  double map_f = 0.0;
  LegacyMetrics legacy;
  std::vector<PrCurveEntry> pr_curves;
  std::vector<std::string> warnings;
  bool operator==(const EvalReport&) const = default;
};

namespace detail {
inline std::string fmt3(const std::optional<double>& v) {
  if (!v) return "   n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%6.3f", *v);
  return buf;
}
inline std::string fmt3(double v) { return fmt3(std::optional<double>(v)); }
}  // namespace detail

// Plain-text summary. Printed values are the JSON values rounded to three
// decimals.
inline std::string render_table(const EvalReport& r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "profile: %s   K: %d   horizon: %d x %.3gs\n",
                profile_name(r.config.class_profile), r.config.k,
                r.config.timeline.horizon_steps, r.config.timeline.dt);
  out += line;
  out += "pairs (tau_cur -> tau_fin):";
  for (std::size_t i = 0; i < r.config.current_thresholds.size(); ++i) {
    std::snprintf(line, sizeof(line), " (%.3g -> %.3g)", r.config.current_thresholds[i],
                  r.config.final_thresholds[i]);
    out += line;
  }
  out += "\n\n";
  std::snprintf(line, sizeof(line), "%-12s %8s %8s %8s\n", "subclass", "gt", "AP_det", "AP_f");
  out += line;
  for (int s = 0; s < kNumSubclasses; ++s) {
    const SubclassResult& sr = r.subclasses[s];
    std::snprintf(line, sizeof(line), "%-12s %8zu %8s %8s\n",
                  subclass_name(static_cast<MotionSubclass>(s)), sr.gt_count,
                  detail::fmt3(sr.ap_det).c_str(), detail::fmt3(sr.ap_f).c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "\nmAP_det %s   mAP_f %s\n", detail::fmt3(r.map_det).c_str(),
                detail::fmt3(r.map_f).c_str());
  out += line;

  out += "\nlegacy (match radius " + detail::fmt3(r.config.legacy_match_threshold) + " m):\n";
  for (std::size_t i = 0; i < r.legacy.ade_at_recall.size(); ++i) {
    std::snprintf(line, sizeof(line), "  ADE@%.2f %s   FDE@%.2f %s\n",
                  r.legacy.ade_at_recall[i].first,
                  detail::fmt3(r.legacy.ade_at_recall[i].second).c_str(),
                  r.legacy.fde_at_recall[i].first,
                  detail::fmt3(r.legacy.fde_at_recall[i].second).c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "  ADE(avg recall) %s   FDE(avg recall) %s   miss rate %s\n",
                detail::fmt3(r.legacy.ade_avg_recall).c_str(),
                detail::fmt3(r.legacy.fde_avg_recall).c_str(),
                detail::fmt3(r.legacy.miss_rate).c_str());
  out += line;

  for (const std::string& w : r.warnings) out += "warning: " + w + "\n";
  for (const std::string& f : r.legacy.flags) out += "flag: " + f + "\n";
  return out;
}

}  // namespace foreval
