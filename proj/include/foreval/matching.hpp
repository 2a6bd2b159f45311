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
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "foreval/config.hpp"
#include "foreval/geometry.hpp"
#include "foreval/subclass.hpp"
#include "foreval/types.hpp"

// Greedy confidence-ordered matching of predictions to ground truth at the
// current frame, top-K candidate selection, the joint detection+forecast
// true-positive decision, and subclass assignment. All tie-breaking is
// deterministic (score descending, then ingestion index ascending) so that
// reports are bit-reproducible.

namespace foreval {

struct MatchRecord {
  std::size_t pred_index = 0;
  double rank_score = 0.0;
  std::optional<std::size_t> matched_gt;  // index into the scene's trajectory list
  bool current_hit = false;
  std::optional<std::size_t> selected_candidate;
  std::optional<double> fde_of_selected;
  bool forecast_hit = false;
  MotionSubclass subclass = MotionSubclass::kStatic;
  bool ignored = false;
};

// Index of the highest-scored candidate (ties: lower index).
inline std::size_t top_ranked_candidate(const ForecastSet& fs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < fs.candidates.size(); ++i) {
    if (fs.candidates[i].forecast_score > fs.candidates[best].forecast_score) best = i;
  }
  return best;
}

// Predictions are processed in strictly descending det_score (ties broken by
// ingestion order); each one matches the nearest still-unmatched GT whose
// offset-0 center distance is <= tau_cur. Records come back indexed by
// prediction, with only the current-frame fields filled.
inline std::vector<MatchRecord> greedy_match_current(const std::vector<ForecastSet>& preds,
                                                     const std::vector<GtTrajectory>& gts,
                                                     double tau_cur) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].det_score > preds[b].det_score;
  });

  std::vector<MatchRecord> records(preds.size());
  std::vector<char> taken(gts.size(), 0);
  for (std::size_t idx : order) {
    MatchRecord& rec = records[idx];
    rec.pred_index = idx;
    rec.rank_score = preds[idx].det_score;
    const Vec2 c = preds[idx].anchor.center();
    std::size_t best = gts.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (taken[j]) continue;
      const double d = center_distance(c, gts[j].first_box().center());
      if (d <= tau_cur && d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best < gts.size()) {
      taken[best] = 1;
      rec.matched_gt = best;
      rec.current_hit = true;
    }
  }
  return records;
}

// Among the top-k candidates by forecast score, picks the one minimizing FDE
// against the GT's final center (ties: lower candidate index).
inline std::pair<std::size_t, double> select_candidate(const ForecastSet& fs,
                                                       const GtTrajectory& gt, int k) {
  std::vector<std::size_t> order(fs.candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fs.candidates[a].forecast_score > fs.candidates[b].forecast_score;
  });

  const Vec2 target = gt.last_timed_box().box.center();
  const std::size_t take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(k));
  std::size_t best_idx = order[0];
  double best_fde = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t ci = order[i];
    const double fde = center_distance(fs.candidates[ci].waypoints.back(), target);
    if (fde < best_fde || (fde == best_fde && ci < best_idx)) {
      best_idx = ci;
      best_fde = fde;
    }
  }
  return {best_idx, best_fde};
}

// Matched records inherit the GT's subclass (also when the forecast missed);
// unmatched records get the derived subclass of their top-ranked candidate.
inline void assign_subclasses(std::vector<MatchRecord>& records,
                              const std::vector<ForecastSet>& preds,
                              const std::vector<GtTrajectory>& gts, const Timeline& tl) {
  for (MatchRecord& rec : records) {
    if (rec.matched_gt) {
      rec.subclass = gts[*rec.matched_gt].subclass;
    } else {
      rec.subclass =
          derive_prediction_subclass(preds[rec.pred_index], top_ranked_candidate(preds[rec.pred_index]), tl);
    }
  }
}

// Predictions matched to incomplete-horizon GT are excluded from PR
// accumulation; those GTs are likewise excluded from per-subclass totals.
inline void apply_ignore_rules(std::vector<MatchRecord>& records,
                               const std::vector<GtTrajectory>& gts) {
  for (MatchRecord& rec : records) {
    if (rec.matched_gt && !gts[*rec.matched_gt].complete) rec.ignored = true;
  }
}

// Full per-scene pass for one (tau_cur, tau_fin) threshold pair.
inline std::vector<MatchRecord> match_scene(const std::vector<ForecastSet>& preds,
                                            const std::vector<GtTrajectory>& gts,
                                            double tau_cur, double tau_fin,
                                            const EvalConfig& cfg) {
  std::vector<MatchRecord> records = greedy_match_current(preds, gts, tau_cur);
  for (MatchRecord& rec : records) {
    const ForecastSet& fs = preds[rec.pred_index];
    if (rec.matched_gt) {
      auto [ci, fde] = select_candidate(fs, gts[*rec.matched_gt], cfg.k);
      rec.selected_candidate = ci;
      rec.fde_of_selected = fde;
      rec.forecast_hit = fde <= tau_fin;
    }
    if (cfg.rank_by_forecast_score) {
      const std::size_t ci = rec.selected_candidate.value_or(top_ranked_candidate(fs));
      rec.rank_score = fs.candidates[ci].forecast_score;
    }
  }
  assign_subclasses(records, preds, gts, cfg.timeline);
  apply_ignore_rules(records, gts);
  return records;
}

inline std::size_t count_complete_gts(const std::vector<GtTrajectory>& gts,
                                      std::optional<MotionSubclass> filter = std::nullopt) {
  std::size_t n = 0;
  for (const auto& gt : gts) {
    if (gt.complete && (!filter || gt.subclass == *filter)) ++n;
  }
  return n;
}

}  // namespace foreval
