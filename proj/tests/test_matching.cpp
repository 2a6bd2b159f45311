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

#include "foreval/matching.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "foreval/rng.hpp"
#include "foreval/subclass.hpp"

namespace foreval {
namespace {

const Timeline kTimeline{0, 6, 0.5};

GtTrajectory make_gt(const std::string& id, Vec2 start, Vec2 velocity, int last_offset = 6) {
  GtTrajectory traj;
  traj.instance_id = id;
  for (int t = 0; t <= last_offset; ++t) {
    const Vec2 p = start + velocity * (t * kTimeline.dt);
    traj.boxes.push_back({t, BevBox::make(p.x, p.y, 4, 2, 0)});
  }
  traj.velocity0 = velocity;
  return finalize_trajectory(std::move(traj), kTimeline);
}

ForecastSet make_pred(Vec2 anchor, double det_score,
                      std::vector<std::pair<Vec2, double>> endpoints_and_scores = {}) {
  ForecastSet fs;
  fs.anchor = BevBox::make(anchor.x, anchor.y, 4, 2, 0);
  fs.det_score = det_score;
  if (endpoints_and_scores.empty()) endpoints_and_scores = {{anchor, det_score}};
  for (const auto& [endpoint, score] : endpoints_and_scores) {
    ForecastCandidate cand;
    for (int t = 1; t <= kTimeline.horizon_steps; ++t) {
      const double frac = static_cast<double>(t) / kTimeline.horizon_steps;
      cand.waypoints.push_back(anchor + (endpoint - anchor) * frac);
    }
    cand.forecast_score = score;
    fs.candidates.push_back(std::move(cand));
  }
  return fs;
}

TEST(GreedyMatch, SinglePredictionAtGtCenter) {
  const std::vector<GtTrajectory> gts = {make_gt("g0", {0, 0}, {0, 0})};
  const auto records = greedy_match_current({make_pred({0, 0}, 0.9)}, gts, 2.0);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_TRUE(records[0].current_hit);
  EXPECT_EQ(records[0].matched_gt, std::optional<std::size_t>(0));
}

TEST(GreedyMatch, OneToOneKeepsHighScore) {
  const std::vector<GtTrajectory> gts = {make_gt("g0", {0, 0}, {0, 0})};
  const std::vector<ForecastSet> preds = {make_pred({0.4, 0}, 0.9), make_pred({0.2, 0}, 0.8)};
  const auto records = greedy_match_current(preds, gts, 2.0);
  EXPECT_TRUE(records[0].current_hit);   // score 0.9 matched first
  EXPECT_FALSE(records[1].current_hit);  // nearer but outranked
}

TEST(GreedyMatch, OutsideThresholdUnmatched) {
  const std::vector<GtTrajectory> gts = {make_gt("g0", {0, 0}, {0, 0})};
  const auto records = greedy_match_current({make_pred({2.5, 0}, 0.9)}, gts, 2.0);
  EXPECT_FALSE(records[0].current_hit);
  EXPECT_FALSE(records[0].matched_gt.has_value());
}

TEST(SelectCandidate, SingleCandidateTrivial) {
  const GtTrajectory gt = make_gt("g0", {0, 0}, {2, 0});
  const ForecastSet fs = make_pred({0, 0}, 0.9, {{{6, 0}, 0.9}});
  const auto [idx, fde] = select_candidate(fs, gt, 1);
  EXPECT_EQ(idx, 0u);
  EXPECT_NEAR(fde, 0.0, 1e-12);
}

TEST(SelectCandidate, MinFdeWithinTopK) {
  const GtTrajectory gt = make_gt("g0", {0, 0}, {2, 0});  // final center (6, 0)
  // Candidates in score order with FDEs {6.0, 1.2, 3.5}.
  const ForecastSet fs = make_pred({0, 0}, 0.9,
                                   {{{12, 0}, 0.9}, {{7.2, 0}, 0.8}, {{2.5, 0}, 0.7}});
  const auto [idx, fde] = select_candidate(fs, gt, 5);
  EXPECT_EQ(idx, 1u);
  EXPECT_NEAR(fde, 1.2, 1e-12);
}

TEST(SelectCandidate, TopKCutExcludesBestCandidate) {
  const GtTrajectory gt = make_gt("g0", {0, 0}, {2, 0});
  // FDEs by score rank: {6.0, 3.5, 0.1}; K=2 can only see the first two.
  const ForecastSet fs = make_pred({0, 0}, 0.9,
                                   {{{12, 0}, 0.9}, {{9.5, 0}, 0.8}, {{6.1, 0}, 0.7}});
  const auto [idx, fde] = select_candidate(fs, gt, 2);
  EXPECT_EQ(idx, 1u);
  EXPECT_NEAR(fde, 3.5, 1e-12);
}

TEST(AssignSubclasses, MatchedInheritsEvenOnForecastMiss) {
  const std::vector<GtTrajectory> gts = {make_gt("g0", {0, 0}, {2, 0})};  // linear
  ASSERT_EQ(gts[0].subclass, MotionSubclass::kLinear);
  // Anchored on the GT but forecasting a wildly wrong endpoint.
  const std::vector<ForecastSet> preds = {make_pred({0, 0}, 0.9, {{{-20, 13}, 0.9}})};
  const EvalConfig cfg = EvalConfig::for_profile(ClassProfile::kCar, kTimeline, 1);
  const auto records = match_scene(preds, gts, 2.0, 4.0, cfg);
  EXPECT_TRUE(records[0].current_hit);
  EXPECT_FALSE(records[0].forecast_hit);
  EXPECT_EQ(records[0].subclass, MotionSubclass::kLinear);
}

TEST(AssignSubclasses, UnmatchedDerivedFromTopCandidate) {
  const std::vector<GtTrajectory> gts = {make_gt("g0", {50, 50}, {0, 0})};
  // Static-looking clutter far from any GT.
  const std::vector<ForecastSet> clutter = {make_pred({0, 0}, 0.3)};
  auto records = greedy_match_current(clutter, gts, 2.0);
  assign_subclasses(records, clutter, gts, kTimeline);
  EXPECT_EQ(records[0].subclass, MotionSubclass::kStatic);

  // Arcing unmatched prediction.
  std::vector<Vec2> arc;
  for (int t = 1; t <= 6; ++t) {
    const double theta = (M_PI / 2.0) * t / 6.0;
    arc.push_back({8.0 * std::sin(theta), 8.0 * (1.0 - std::cos(theta))});
  }
  ForecastSet arcing;
  arcing.anchor = BevBox::make(0, 0, 4, 2, 0);
  arcing.det_score = 0.3;
  arcing.candidates = {ForecastCandidate{arc, 0.3}};
  std::vector<ForecastSet> preds = {arcing};
  records = greedy_match_current(preds, gts, 2.0);
  assign_subclasses(records, preds, gts, kTimeline);
  EXPECT_EQ(records[0].subclass, MotionSubclass::kNonLinear);
}

TEST(IgnoreRules, PartialHorizonGtIgnoresItsMatch) {
  const std::vector<GtTrajectory> gts = {make_gt("g0", {0, 0}, {2, 0}, 3)};  // offsets 0..3 of 6
  ASSERT_FALSE(gts[0].complete);
  const std::vector<ForecastSet> preds = {make_pred({0, 0}, 0.9)};
  const EvalConfig cfg = EvalConfig::for_profile(ClassProfile::kCar, kTimeline, 1);
  const auto records = match_scene(preds, gts, 2.0, 4.0, cfg);
  EXPECT_TRUE(records[0].current_hit);
  EXPECT_TRUE(records[0].ignored);
  EXPECT_EQ(count_complete_gts(gts), 0u);
}

TEST(IgnoreRules, CompleteGtsNotIgnored) {
  const std::vector<GtTrajectory> gts = {make_gt("g0", {0, 0}, {0, 0}),
                                         make_gt("g1", {20, 0}, {0, 0}),
                                         make_gt("g2", {40, 0}, {0, 0}, 4)};
  const std::vector<ForecastSet> preds = {make_pred({0, 0}, 0.9), make_pred({20, 0}, 0.8),
                                          make_pred({40, 0}, 0.7)};
  const EvalConfig cfg = EvalConfig::for_profile(ClassProfile::kCar, kTimeline, 1);
  const auto records = match_scene(preds, gts, 2.0, 4.0, cfg);
  EXPECT_FALSE(records[0].ignored);
  EXPECT_FALSE(records[1].ignored);
  EXPECT_TRUE(records[2].ignored);
  EXPECT_EQ(count_complete_gts(gts), 2u);
}

TEST(MatchingProperty, OneToOneAtCurrentFrame) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GtTrajectory> gts;
    for (int i = 0; i < 6; ++i) {
      gts.push_back(make_gt("g" + std::to_string(i),
                            {rng.uniform(-10, 10), rng.uniform(-10, 10)}, {0, 0}));
    }
    std::vector<ForecastSet> preds;
    for (int i = 0; i < 10; ++i) {
      preds.push_back(make_pred({rng.uniform(-10, 10), rng.uniform(-10, 10)}, rng.uniform(0, 1)));
    }
    const auto records = greedy_match_current(preds, gts, 4.0);
    std::vector<char> seen(gts.size(), 0);
    for (const auto& rec : records) {
      if (!rec.matched_gt) continue;
      EXPECT_FALSE(seen[*rec.matched_gt]);
      seen[*rec.matched_gt] = 1;
    }
  }
}

TEST(MatchingProperty, ForecastHitMonotoneInK) {
  Rng rng(37);
  const GtTrajectory gt = make_gt("g0", {0, 0}, {2, 0});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<Vec2, double>> cands;
    const int n = 1 + static_cast<int>(rng.uniform() * 6);
    for (int i = 0; i < n; ++i) {
      cands.push_back({{rng.uniform(-2, 14), rng.uniform(-8, 8)}, rng.uniform(0, 1)});
    }
    const ForecastSet fs = make_pred({0, 0}, 0.9, cands);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n + 2; ++k) {
      const auto [idx, fde] = select_candidate(fs, gt, k);
      EXPECT_LE(fde, prev + 1e-15);  // min over a superset cannot grow
      prev = fde;
    }
  }
}

TEST(MatchingProperty, PermutationInvarianceWithDistinctScores) {
  Rng rng(41);
  std::vector<GtTrajectory> gts;
  for (int i = 0; i < 5; ++i) {
    gts.push_back(make_gt("g" + std::to_string(i), {5.0 * i, 0}, {1, 0}));
  }
  std::vector<ForecastSet> preds;
  for (int i = 0; i < 8; ++i) {
    preds.push_back(make_pred({rng.uniform(-2, 24), rng.uniform(-3, 3)},
                              (i + 1) / 10.0,  // distinct scores
                              {{{rng.uniform(-2, 24), rng.uniform(-3, 3)}, 0.5}}));
  }
  const EvalConfig cfg = EvalConfig::for_profile(ClassProfile::kCar, kTimeline, 1);
  const auto base = match_scene(preds, gts, 2.0, 4.0, cfg);

  std::vector<std::size_t> perm(preds.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform() * i)]);
  }
  std::vector<ForecastSet> shuffled(preds.size());
  for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = preds[perm[i]];
  const auto permuted = match_scene(shuffled, gts, 2.0, 4.0, cfg);

  for (std::size_t i = 0; i < perm.size(); ++i) {
    const MatchRecord& a = base[perm[i]];
    const MatchRecord& b = permuted[i];
    EXPECT_EQ(a.current_hit, b.current_hit);
    EXPECT_EQ(a.matched_gt, b.matched_gt);
    EXPECT_EQ(a.forecast_hit, b.forecast_hit);
    EXPECT_EQ(a.subclass, b.subclass);
    EXPECT_EQ(a.fde_of_selected, b.fde_of_selected);
    EXPECT_EQ(a.rank_score, b.rank_score);
  }
}

}  // namespace
}  // namespace foreval
