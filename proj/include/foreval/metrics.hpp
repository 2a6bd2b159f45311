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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "foreval/config.hpp"
#include "foreval/matching.hpp"
#include "foreval/parallel.hpp"
#include "foreval/report.hpp"
#include "foreval/types.hpp"

// PR-curve construction and the AP family. A forecast true positive requires
// a center-distance match at the current frame AND a final-frame displacement
// within the paired threshold; AP_f averages over the ordered threshold
// pairs, and mAP_f averages AP_f over the three motion subclasses.

namespace foreval {

enum class HitField { kCurrent, kForecast };

struct PrCurve {
  std::vector<std::pair<double, double>> points;  // (recall, precision) per scored record
  std::vector<double> interpolated;               // max-interpolated precision on the grid
};

struct ApResult {
  std::optional<double> ap;  // nullopt iff gt_count == 0
  PrCurve curve;
};

// AP from an already ranked record list (rank_score descending, ignored
// records removed). Precision is max-interpolated and sampled at pr_points
// evenly spaced recall levels in [0,1]; AP is the mean of the samples.
// With nuscenes_clip, samples at recall <= 0.1 are dropped and precision is
// clipped: AP = mean(max(0, p - 0.1)) / 0.9 over the remaining samples.
inline ApResult ap_from_records(const std::vector<MatchRecord>& records, std::size_t gt_count,
                                HitField field, const EvalConfig& cfg) {
  if (gt_count == 0) return {};  // undefined, never silently 0

  ApResult res;
  res.ap = 0.0;
  std::size_t tp = 0, fp = 0;
  res.curve.points.reserve(records.size());
  for (const MatchRecord& r : records) {
    const bool hit = field == HitField::kCurrent ? r.current_hit : r.forecast_hit;
    hit ? ++tp : ++fp;
    res.curve.points.emplace_back(static_cast<double>(tp) / static_cast<double>(gt_count),
                                  static_cast<double>(tp) / static_cast<double>(tp + fp));
  }

  const int n = cfg.pr_points;
  res.curve.interpolated.assign(n, 0.0);
  double best = 0.0;
  int i = static_cast<int>(res.curve.points.size()) - 1;
  for (int g = n - 1; g >= 0; --g) {
    const double r = static_cast<double>(g) / (n - 1);
    while (i >= 0 && res.curve.points[i].first >= r) {
      best = std::max(best, res.curve.points[i].second);
      --i;
    }
    res.curve.interpolated[g] = best;
  }

  if (!cfg.nuscenes_clip) {
    double sum = 0.0;
    for (double p : res.curve.interpolated) sum += p;
    res.ap = sum / n;
  } else {
    constexpr double kMinRecall = 0.1, kMinPrecision = 0.1;
    double sum = 0.0;
    int cnt = 0;
    for (int g = 0; g < n; ++g) {
      if (static_cast<double>(g) / (n - 1) <= kMinRecall) continue;
      sum += std::max(0.0, res.curve.interpolated[g] - kMinPrecision);
      ++cnt;
    }
    res.ap = cnt > 0 ? sum / cnt / (1.0 - kMinPrecision) : 0.0;
  }
  return res;
}

// Mean over offsets 1..T of the waypoint-to-center L2 distance.
inline double ade(const ForecastCandidate& cand, const GtTrajectory& gt, const Timeline& tl) {
  if (!gt.complete) throw ValidationError("ade: ground truth must be complete");
  if (cand.waypoints.size() != static_cast<std::size_t>(tl.horizon_steps)) {
    throw ValidationError("ade: waypoint count != horizon_steps");
  }
  double sum = 0.0;
  for (int t = 1; t <= tl.horizon_steps; ++t) {
    sum += center_distance(cand.waypoints[t - 1], gt.boxes[t].box.center());
  }
  return sum / tl.horizon_steps;
}

// L2 distance at the final offset.
inline double fde(const ForecastCandidate& cand, const GtTrajectory& gt) {
  if (!gt.complete) throw ValidationError("fde: ground truth must be complete");
  return center_distance(cand.waypoints.back(), gt.last_timed_box().box.center());
}

namespace detail {

// Scene-aligned inputs: one prediction list per GT scene (possibly empty).
struct AlignedScenes {
  const std::vector<GtScene>* gts = nullptr;
  std::vector<const std::vector<ForecastSet>*> preds;  // parallel to gts->size()
};

inline AlignedScenes align_scenes(const std::vector<GtScene>& gt_scenes,
                                  const std::vector<PredScene>& pred_scenes) {
  static const std::vector<ForecastSet> kEmpty;
  std::map<std::string, const PredScene*> by_id;
  for (const PredScene& ps : pred_scenes) {
    if (!by_id.emplace(ps.scene_id, &ps).second) {
      throw ValidationError("duplicate prediction scene_id '" + ps.scene_id + "'");
    }
  }
  AlignedScenes out;
  out.gts = &gt_scenes;
  out.preds.resize(gt_scenes.size(), &kEmpty);
  std::map<std::string, std::size_t> gt_index;
  for (std::size_t i = 0; i < gt_scenes.size(); ++i) {
    if (!gt_index.emplace(gt_scenes[i].scene_id, i).second) {
      throw ValidationError("duplicate ground-truth scene_id '" + gt_scenes[i].scene_id + "'");
    }
  }
  for (const PredScene& ps : pred_scenes) {
    auto it = gt_index.find(ps.scene_id);
    if (it == gt_index.end()) {
      throw ValidationError("prediction scene_id '" + ps.scene_id + "' not present in ground truth");
    }
    out.preds[it->second] = &ps.forecasts;
  }
  return out;
}

// Flattens per-scene records in scene order, drops ignored ones, and sorts by
// rank score descending. The stable sort keeps (scene, prediction) order for
// equal scores, so pooled ranking is reproducible across thread counts.
inline std::vector<MatchRecord> pool_records(std::vector<std::vector<MatchRecord>>& per_scene) {
  std::vector<MatchRecord> pooled;
  std::size_t total = 0;
  for (const auto& v : per_scene) total += v.size();
  pooled.reserve(total);
  for (const auto& v : per_scene) {
    for (const MatchRecord& r : v) {
      if (!r.ignored) pooled.push_back(r);
    }
  }
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const MatchRecord& a, const MatchRecord& b) { return a.rank_score > b.rank_score; });
  return pooled;
}

struct PairRecords {
  double tau_cur = 0.0;
  double tau_fin = 0.0;
  std::vector<MatchRecord> pooled;  // sorted, ignored removed
};

// One matching pass per threshold pair, parallel over (pair, scene).
inline std::vector<PairRecords> run_pair_matchings(const AlignedScenes& scenes,
                                                   const EvalConfig& cfg, unsigned threads) {
  const std::size_t n_pairs = cfg.current_thresholds.size();
  const std::size_t n_scenes = scenes.gts->size();
  std::vector<std::vector<std::vector<MatchRecord>>> slots(
      n_pairs, std::vector<std::vector<MatchRecord>>(n_scenes));
  parallel_for(n_pairs * n_scenes, threads, [&](std::size_t job) {
    const std::size_t p = job / n_scenes;
    const std::size_t s = job % n_scenes;
    slots[p][s] = match_scene(*scenes.preds[s], (*scenes.gts)[s].trajectories,
                              cfg.current_thresholds[p], cfg.final_thresholds[p], cfg);
  });
  std::vector<PairRecords> out(n_pairs);
  for (std::size_t p = 0; p < n_pairs; ++p) {
    out[p].tau_cur = cfg.current_thresholds[p];
    out[p].tau_fin = cfg.final_thresholds[p];
    out[p].pooled = pool_records(slots[p]);
  }
  return out;
}

inline std::array<std::size_t, kNumSubclasses> pooled_gt_counts(const std::vector<GtScene>& gt_scenes) {
  std::array<std::size_t, kNumSubclasses> counts{};
  for (const GtScene& sc : gt_scenes) {
    for (const GtTrajectory& gt : sc.trajectories) {
      if (gt.complete) ++counts[static_cast<int>(gt.subclass)];
    }
  }
  return counts;
}

inline std::vector<MatchRecord> filter_subclass(const std::vector<MatchRecord>& records,
                                                MotionSubclass s) {
  std::vector<MatchRecord> out;
  out.reserve(records.size());
  for (const MatchRecord& r : records) {
    if (r.subclass == s) out.push_back(r);
  }
  return out;
}

inline void validate_inputs(const std::vector<GtScene>& gt_scenes,
                            const std::vector<PredScene>& pred_scenes, const EvalConfig& cfg) {
  for (const GtScene& sc : gt_scenes) {
    for (const GtTrajectory& gt : sc.trajectories) gt.validate(cfg.timeline);
  }
  for (const PredScene& sc : pred_scenes) {
    for (const ForecastSet& fs : sc.forecasts) fs.validate(cfg.timeline);
  }
}

}  // namespace detail

// AP_f for one subclass, averaged over the ordered threshold pairs. Returns
// nullopt when the subclass has no complete ground truth.
inline std::optional<double> forecast_ap(const std::vector<GtScene>& gt_scenes,
                                         const std::vector<PredScene>& pred_scenes,
                                         const EvalConfig& cfg_in, MotionSubclass filter,
                                         unsigned threads = 1) {
  const EvalConfig cfg = validate_config(cfg_in);
  detail::validate_inputs(gt_scenes, pred_scenes, cfg);
  const auto scenes = detail::align_scenes(gt_scenes, pred_scenes);
  const auto counts = detail::pooled_gt_counts(gt_scenes);
  const std::size_t gt_count = counts[static_cast<int>(filter)];
  if (gt_count == 0) return std::nullopt;
  const auto pairs = detail::run_pair_matchings(scenes, cfg, threads);
  double sum = 0.0;
  for (const auto& pair : pairs) {
    const auto res = ap_from_records(detail::filter_subclass(pair.pooled, filter), gt_count,
                                     HitField::kForecast, cfg);
    sum += *res.ap;
  }
  return sum / pairs.size();
}

struct MapResult {
  double value = 0.0;
  std::array<std::optional<double>, kNumSubclasses> per_subclass;
  std::vector<std::string> warnings;
};

namespace detail {

inline MapResult reduce_map(const std::array<std::optional<double>, kNumSubclasses>& per_subclass,
                            const char* what) {
  MapResult out;
  out.per_subclass = per_subclass;
  double sum = 0.0;
  int defined = 0;
  for (int s = 0; s < kNumSubclasses; ++s) {
    if (per_subclass[s]) {
      sum += *per_subclass[s];
      ++defined;
    } else {
      out.warnings.push_back(std::string("subclass '") +
                             subclass_name(static_cast<MotionSubclass>(s)) +
                             "' has no complete ground truth; excluded from " + what);
    }
  }
  if (defined == 0) {
    throw ValidationError(std::string(what) + " undefined: no subclass has complete ground truth");
  }
  out.value = sum / defined;
  return out;
}

// Shared engine so the mAP ops and evaluate() use one matching pass.
struct CoreOutcome {
  std::array<std::size_t, kNumSubclasses> gt_counts{};
  std::vector<PairRecords> pairs;
  // ap[pair][subclass]
  std::vector<std::array<ApResult, kNumSubclasses>> det;
  std::vector<std::array<ApResult, kNumSubclasses>> fcast;
};

inline CoreOutcome run_core(const std::vector<GtScene>& gt_scenes,
                            const std::vector<PredScene>& pred_scenes, const EvalConfig& cfg,
                            unsigned threads) {
  validate_inputs(gt_scenes, pred_scenes, cfg);
  const auto scenes = align_scenes(gt_scenes, pred_scenes);
  CoreOutcome out;
  out.gt_counts = pooled_gt_counts(gt_scenes);
  out.pairs = run_pair_matchings(scenes, cfg, threads);
  out.det.resize(out.pairs.size());
  out.fcast.resize(out.pairs.size());
  for (std::size_t p = 0; p < out.pairs.size(); ++p) {
    for (int s = 0; s < kNumSubclasses; ++s) {
      const auto sub = filter_subclass(out.pairs[p].pooled, static_cast<MotionSubclass>(s));
      out.det[p][s] = ap_from_records(sub, out.gt_counts[s], HitField::kCurrent, cfg);
      out.fcast[p][s] = ap_from_records(sub, out.gt_counts[s], HitField::kForecast, cfg);
    }
  }
  return out;
}

inline std::array<std::optional<double>, kNumSubclasses> mean_over_pairs(
    const std::vector<std::array<ApResult, kNumSubclasses>>& per_pair) {
  std::array<std::optional<double>, kNumSubclasses> out;
  for (int s = 0; s < kNumSubclasses; ++s) {
    double sum = 0.0;
    bool defined = !per_pair.empty();
    for (const auto& pair : per_pair) {
      if (!pair[s].ap) {
        defined = false;
        break;
      }
      sum += *pair[s].ap;
    }
    if (defined) out[s] = sum / per_pair.size();
  }
  return out;
}

}  // namespace detail

// mAP_f: arithmetic mean of the per-subclass AP_f values. Subclasses with no
// complete ground truth are excluded from the mean with a warning; all three
// undefined is an error.
inline MapResult map_f(const std::vector<GtScene>& gt_scenes,
                       const std::vector<PredScene>& pred_scenes, const EvalConfig& cfg_in,
                       unsigned threads = 1) {
  const EvalConfig cfg = validate_config(cfg_in);
  const auto core = detail::run_core(gt_scenes, pred_scenes, cfg, threads);
  return detail::reduce_map(detail::mean_over_pairs(core.fcast), "mAP_f");
}

inline MapResult detection_map(const std::vector<GtScene>& gt_scenes,
                               const std::vector<PredScene>& pred_scenes, const EvalConfig& cfg_in,
                               unsigned threads = 1) {
  const EvalConfig cfg = validate_config(cfg_in);
  const auto core = detail::run_core(gt_scenes, pred_scenes, cfg, threads);
  return detail::reduce_map(detail::mean_over_pairs(core.det), "mAP_det");
}

namespace detail {

struct LegacyRecord {
  double rank_score = 0.0;
  bool tp = false;
  double min_ade = 0.0;  // min over the top-K candidates, valid when tp
  double min_fde = 0.0;
};

inline std::vector<LegacyRecord> run_legacy_matching(const AlignedScenes& scenes,
                                                     const EvalConfig& cfg, unsigned threads) {
  const std::size_t n_scenes = scenes.gts->size();
  std::vector<std::vector<LegacyRecord>> slots(n_scenes);
  parallel_for(n_scenes, threads, [&](std::size_t s) {
    const auto& preds = *scenes.preds[s];
    const auto& gts = (*scenes.gts)[s].trajectories;
    auto records = greedy_match_current(preds, gts, cfg.legacy_match_threshold);
    assign_subclasses(records, preds, gts, cfg.timeline);
    apply_ignore_rules(records, gts);
    std::vector<LegacyRecord>& out = slots[s];
    out.reserve(records.size());
    for (const MatchRecord& rec : records) {
      if (rec.ignored) continue;
      LegacyRecord lr;
      lr.rank_score = preds[rec.pred_index].det_score;
      if (rec.matched_gt) {
        const ForecastSet& fs = preds[rec.pred_index];
        const GtTrajectory& gt = gts[*rec.matched_gt];
        std::vector<std::size_t> order(fs.candidates.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return fs.candidates[a].forecast_score > fs.candidates[b].forecast_score;
        });
        const std::size_t take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(cfg.k));
        double best_ade = std::numeric_limits<double>::infinity();
        double best_fde = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < take; ++i) {
          best_ade = std::min(best_ade, ade(fs.candidates[order[i]], gt, cfg.timeline));
          best_fde = std::min(best_fde, fde(fs.candidates[order[i]], gt));
        }
        lr.tp = true;
        lr.min_ade = best_ade;
        lr.min_fde = best_fde;
      }
      out.push_back(lr);
    }
  });
  std::vector<LegacyRecord> pooled;
  for (const auto& v : slots) pooled.insert(pooled.end(), v.begin(), v.end());
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const LegacyRecord& a, const LegacyRecord& b) { return a.rank_score > b.rank_score; });
  return pooled;
}

}  // namespace detail

// ADE/FDE at fixed recall levels plus recall-averaged variants and the miss
// rate. Matching uses the single legacy radius; per record the top-K minimum
// ADE and FDE are measured independently. For a recall level r the shortest
// det_score-ranked prefix reaching recall >= r is taken and the metric is the
// mean over the true positives inside it; unattainable levels fall back to
// the maximum achieved recall and are flagged. The miss rate is the fraction
// of all true-positive records whose selected FDE exceeds the threshold.
inline LegacyMetrics legacy_displacement(const std::vector<GtScene>& gt_scenes,
                                         const std::vector<PredScene>& pred_scenes,
                                         const EvalConfig& cfg_in, unsigned threads = 1) {
  const EvalConfig cfg = validate_config(cfg_in);
  detail::validate_inputs(gt_scenes, pred_scenes, cfg);
  const auto scenes = detail::align_scenes(gt_scenes, pred_scenes);
  const auto records = detail::run_legacy_matching(scenes, cfg, threads);

  std::size_t gt_total = 0;
  for (const GtScene& sc : gt_scenes) gt_total += count_complete_gts(sc.trajectories);

  // Prefix sums over true positives in ranked order.
  std::vector<double> ade_prefix, fde_prefix;
  std::size_t misses = 0;
  for (const auto& r : records) {
    if (!r.tp) continue;
    ade_prefix.push_back((ade_prefix.empty() ? 0.0 : ade_prefix.back()) + r.min_ade);
    fde_prefix.push_back((fde_prefix.empty() ? 0.0 : fde_prefix.back()) + r.min_fde);
    if (r.min_fde > cfg.miss_fde_threshold) ++misses;
  }
  const std::size_t total_tp = ade_prefix.size();

  LegacyMetrics out;
  auto at_level = [&](double level) -> std::pair<std::optional<double>, std::optional<double>> {
    if (total_tp == 0 || gt_total == 0) return {std::nullopt, std::nullopt};
    std::size_t needed = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(gt_total) - 1e-9));
    needed = std::max<std::size_t>(needed, 1);
    if (needed > total_tp) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "recall %.2f unattainable; reported at %.4f", level,
                    static_cast<double>(total_tp) / static_cast<double>(gt_total));
      out.flags.push_back(buf);
      needed = total_tp;
    }
    return {ade_prefix[needed - 1] / needed, fde_prefix[needed - 1] / needed};
  };

  for (double level : cfg.recall_levels) {
    auto [a, f] = at_level(level);
    out.ade_at_recall.emplace_back(level, a);
    out.fde_at_recall.emplace_back(level, f);
  }

  // Recall-averaged variant over the fixed grid {0.1, ..., 1.0}.
  if (total_tp > 0 && gt_total > 0) {
    double ade_sum = 0.0, fde_sum = 0.0;
    for (int i = 1; i <= 10; ++i) {
      auto [a, f] = at_level(i / 10.0);
      ade_sum += *a;
      fde_sum += *f;
    }
    out.ade_avg_recall = ade_sum / 10.0;
    out.fde_avg_recall = fde_sum / 10.0;
    out.miss_rate = static_cast<double>(misses) / static_cast<double>(total_tp);
  } else {
    out.flags.push_back("no true positives; displacement metrics undefined");
  }
  return out;
}

// Full evaluation: per-subclass AP_det/AP_f over the threshold pairs, mAP_det
// and mAP_f over the defined subclasses, legacy metrics, and forecast PR
// curves, assembled into a serializable report.
inline EvalReport evaluate(const std::vector<GtScene>& gt_scenes,
                           const std::vector<PredScene>& pred_scenes, const EvalConfig& cfg_in,
                           unsigned threads = 1, std::string gt_digest = "",
                           std::string pred_digest = "") {
  const EvalConfig cfg = validate_config(cfg_in);
  const auto core = detail::run_core(gt_scenes, pred_scenes, cfg, threads);

  EvalReport report;
  report.config = cfg;
  report.gt_digest = std::move(gt_digest);
  report.pred_digest = std::move(pred_digest);

  const auto det_means = detail::mean_over_pairs(core.det);
  const auto f_means = detail::mean_over_pairs(core.fcast);
  for (int s = 0; s < kNumSubclasses; ++s) {
    report.subclasses[s].gt_count = core.gt_counts[s];
    report.subclasses[s].ap_det = det_means[s];
    report.subclasses[s].ap_f = f_means[s];
  }
  MapResult md = detail::reduce_map(det_means, "mAP_det");
  MapResult mf = detail::reduce_map(f_means, "mAP_f");
  report.map_det = md.value;
  report.map_f = mf.value;
  report.warnings = std::move(mf.warnings);

  report.legacy = legacy_displacement(gt_scenes, pred_scenes, cfg, threads);
  if (!report.legacy.ade_avg_recall) {
    report.warnings.push_back("legacy displacement metrics undefined (no true positive matches)");
  }

  const int n = cfg.pr_points;
  for (int s = 0; s < kNumSubclasses; ++s) {
    if (core.gt_counts[s] == 0) continue;
    for (std::size_t p = 0; p < core.pairs.size(); ++p) {
      PrCurveEntry entry;
      entry.subclass = static_cast<MotionSubclass>(s);
      entry.tau_cur = core.pairs[p].tau_cur;
      entry.tau_fin = core.pairs[p].tau_fin;
      const auto& interp = core.fcast[p][s].curve.interpolated;
      entry.points.reserve(n);
      for (int g = 0; g < n; ++g) {
        entry.points.emplace_back(static_cast<double>(g) / (n - 1), interp[g]);
      }
      report.pr_curves.push_back(std::move(entry));
    }
  }
  return report;
}

}  // namespace foreval
