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
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "foreval/baselines.hpp"
#include "foreval/config.hpp"
#include "foreval/matching.hpp"
#include "foreval/metrics.hpp"
#include "foreval/parallel.hpp"
#include "foreval/rng.hpp"
#include "foreval/subclass.hpp"
#include "foreval/types.hpp"

// Deterministic synthetic scenes and a detector simulator. Agents follow
// closed-form kinematics targeting one motion subclass each; the sampler
// rejects parameter draws whose derived subclass disagrees with the intent,
// so generated populations carry exact subclass labels.

namespace foreval {

struct StaticMotion {
  double yaw = 0.0;
};
struct LinearMotion {
  double speed = 0.0;
  double heading = 0.0;
};
struct ArcMotion {
  double speed = 0.0;
  double turn_rate = 0.0;  // rad/s, non-zero
  double heading = 0.0;    // initial heading
};
using AgentMotion = std::variant<StaticMotion, LinearMotion, ArcMotion>;

struct AgentSpec {
  AgentMotion motion;
  Vec2 spawn;
  double length = 4.6;
  double width = 2.0;

  MotionSubclass intended() const {
    if (std::holds_alternative<StaticMotion>(motion)) return MotionSubclass::kStatic;
    if (std::holds_alternative<LinearMotion>(motion)) return MotionSubclass::kLinear;
    return MotionSubclass::kNonLinear;
  }
};

inline Vec2 agent_position(const AgentSpec& spec, double t) {
  if (const auto* lin = std::get_if<LinearMotion>(&spec.motion)) {
    return spec.spawn + Vec2{std::cos(lin->heading), std::sin(lin->heading)} * (lin->speed * t);
  }
  if (const auto* arc = std::get_if<ArcMotion>(&spec.motion)) {
    const double h0 = arc->heading;
    const double h = h0 + arc->turn_rate * t;
    const double r = arc->speed / arc->turn_rate;
    return spec.spawn + Vec2{r * (std::sin(h) - std::sin(h0)), r * (std::cos(h0) - std::cos(h))};
  }
  return spec.spawn;
}

inline double agent_yaw(const AgentSpec& spec, double t) {
  if (const auto* lin = std::get_if<LinearMotion>(&spec.motion)) return normalize_angle(lin->heading);
  if (const auto* arc = std::get_if<ArcMotion>(&spec.motion)) {
    return normalize_angle(arc->heading + arc->turn_rate * t);
  }
  return normalize_angle(std::get<StaticMotion>(spec.motion).yaw);
}

inline Vec2 agent_velocity0(const AgentSpec& spec) {
  if (const auto* lin = std::get_if<LinearMotion>(&spec.motion)) {
    return Vec2{std::cos(lin->heading), std::sin(lin->heading)} * lin->speed;
  }
  if (const auto* arc = std::get_if<ArcMotion>(&spec.motion)) {
    return Vec2{std::cos(arc->heading), std::sin(arc->heading)} * arc->speed;
  }
  return Vec2{0.0, 0.0};
}

inline double agent_speed(const AgentSpec& spec) { return agent_velocity0(spec).norm(); }

namespace detail {
inline void check_spec(const AgentSpec& spec) {
  if (const auto* lin = std::get_if<LinearMotion>(&spec.motion)) {
    if (lin->speed < 0.0) throw ValidationError("AgentSpec: speed must be >= 0");
  }
  if (const auto* arc = std::get_if<ArcMotion>(&spec.motion)) {
    if (arc->speed < 0.0) throw ValidationError("AgentSpec: speed must be >= 0");
    if (arc->turn_rate == 0.0) throw ValidationError("AgentSpec: arc turn_rate must be non-zero");
  }
  if (!(spec.length > 0.0) || !(spec.width > 0.0)) {
    throw ValidationError("AgentSpec: box size must be positive");
  }
}

inline bool classifies_as_intended(const AgentSpec& spec, const Timeline& tl) {
  const double elapsed = tl.horizon_seconds();
  const BevBox first = BevBox::make(spec.spawn.x, spec.spawn.y, spec.length, spec.width,
                                    agent_yaw(spec, 0.0));
  const Vec2 pT = agent_position(spec, elapsed);
  const BevBox last = BevBox::make(pT.x, pT.y, spec.length, spec.width, agent_yaw(spec, elapsed));
  return derive_subclass(first, last, agent_velocity0(spec), elapsed) == spec.intended();
}
}  // namespace detail

// Closed-form trajectory for a spec; errors when the derived subclass would
// disagree with the spec's intent (e.g. a speed-0 "linear" agent).
inline GtTrajectory trajectory_from_spec(const AgentSpec& spec, const Timeline& tl,
                                         std::string instance_id) {
  detail::check_spec(spec);
  GtTrajectory traj;
  traj.instance_id = std::move(instance_id);
  traj.boxes.reserve(tl.horizon_steps + 1);
  for (int t = 0; t <= tl.horizon_steps; ++t) {
    const double secs = t * tl.dt;
    const Vec2 p = agent_position(spec, secs);
    traj.boxes.push_back(
        TimedBox{t, BevBox::make(p.x, p.y, spec.length, spec.width, agent_yaw(spec, secs))});
  }
  traj.velocity0 = agent_velocity0(spec);
  traj = finalize_trajectory(std::move(traj), tl);
  if (traj.subclass != spec.intended()) {
    throw ValidationError("agent '" + traj.instance_id + "': intended subclass " +
                          subclass_name(spec.intended()) + " but trajectory classifies as " +
                          subclass_name(traj.subclass));
  }
  return traj;
}

inline std::vector<GtTrajectory> generate_scene(const std::vector<AgentSpec>& specs,
                                                const Timeline& tl,
                                                const std::string& id_prefix = "agent") {
  std::vector<GtTrajectory> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out.push_back(trajectory_from_spec(specs[i], tl, id_prefix + "_" + std::to_string(i)));
  }
  return out;
}

struct SceneSamplerParams {
  std::array<double, kNumSubclasses> mixture{0.6, 0.25, 0.15};  // static, linear, non-linear
  int agents_min = 20;
  int agents_max = 40;
  double extent = 100.0;        // scene is [-extent/2, extent/2]^2
  double spawn_margin = 12.0;   // keeps trajectories inside the extent
  double min_separation = 6.0;  // between spawn points
  // Defaults keep every mover's start-to-end displacement above 8 m:
  // linear agents cover speed*3s >= 9 m, arcs a chord of (2v/w)sin(1.5w) >= 8.1 m.
  std::array<double, 2> speed_range{3.0, 3.6};
  std::array<double, 2> turn_rate_range{0.35, 0.5};  // magnitude; sign is random
  std::array<double, 2> length_range{4.2, 5.0};
  std::array<double, 2> width_range{1.8, 2.2};

  void validate() const {
    const double sum = mixture[0] + mixture[1] + mixture[2];
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("sampler: mixture must sum to 1");
    for (double m : mixture) {
      if (m < 0.0) throw ValidationError("sampler: mixture shares must be >= 0");
    }
    if (agents_min < 1 || agents_max < agents_min) {
      throw ValidationError("sampler: need 1 <= agents_min <= agents_max");
    }
    if (!(extent > 2.0 * spawn_margin)) throw ValidationError("sampler: extent too small for margin");
  }
};

// Draws agent specs for one scene; parameter draws whose derived subclass
// disagrees with the intended one are rejected and redrawn.
inline std::vector<AgentSpec> sample_scene_specs(const SceneSamplerParams& params,
                                                 const Timeline& tl, Rng& rng) {
  params.validate();
  const int n_agents =
      params.agents_min +
      static_cast<int>(rng.uniform() * (params.agents_max - params.agents_min + 1));
  const double lo = -params.extent / 2.0 + params.spawn_margin;
  const double hi = params.extent / 2.0 - params.spawn_margin;

  std::vector<AgentSpec> specs;
  specs.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    const double u = rng.uniform();
    MotionSubclass target = u < params.mixture[0] ? MotionSubclass::kStatic
                            : u < params.mixture[0] + params.mixture[1] ? MotionSubclass::kLinear
                                                                        : MotionSubclass::kNonLinear;
    Vec2 spawn;
    bool placed = false;
    for (int tries = 0; tries < 1000 && !placed; ++tries) {
      spawn = {rng.uniform(lo, hi), rng.uniform(lo, hi)};
      placed = true;
      for (const AgentSpec& other : specs) {
        if (center_distance(spawn, other.spawn) < params.min_separation) {
          placed = false;
          break;
        }
      }
    }
    if (!placed) throw ValidationError("sampler: could not place agent with required separation");

    AgentSpec spec;
    spec.spawn = spawn;
    spec.length = rng.uniform(params.length_range[0], params.length_range[1]);
    spec.width = rng.uniform(params.width_range[0], params.width_range[1]);
    bool accepted = false;
    for (int tries = 0; tries < 100 && !accepted; ++tries) {
      switch (target) {
        case MotionSubclass::kStatic:
          spec.motion = StaticMotion{rng.uniform(-M_PI, M_PI)};
          break;
        case MotionSubclass::kLinear:
          spec.motion = LinearMotion{rng.uniform(params.speed_range[0], params.speed_range[1]),
                                     rng.uniform(-M_PI, M_PI)};
          break;
        case MotionSubclass::kNonLinear: {
          const double mag = rng.uniform(params.turn_rate_range[0], params.turn_rate_range[1]);
          spec.motion = ArcMotion{rng.uniform(params.speed_range[0], params.speed_range[1]),
                                  rng.bernoulli(0.5) ? mag : -mag, rng.uniform(-M_PI, M_PI)};
          break;
        }
      }
      accepted = detail::classifies_as_intended(spec, tl);
    }
    if (!accepted) throw ValidationError("sampler: could not draw parameters for intended subclass");
    specs.push_back(spec);
  }
  return specs;
}

// Detector noise. score_model: score = clamp(1 - err/(3*pos_sigma) -
// score_jitter*u, 0.05, 1), err being the sampled positional error, u a
// seeded uniform; any monotone-in-error model works since AP depends only on
// ranks.
struct NoiseModel {
  double pos_sigma = 0.0;
  double vel_sigma = 0.0;
  double drop_prob = 0.0;
  double clutter_rate = 0.0;  // expected false detections per scene and frame
  double score_jitter = 0.05;
  std::array<double, 2> clutter_score_range{0.05, 0.25};
  std::uint64_t seed = 0;

  void validate() const {
    if (pos_sigma < 0.0 || vel_sigma < 0.0) throw ValidationError("noise: sigmas must be >= 0");
    if (drop_prob < 0.0 || drop_prob > 1.0) throw ValidationError("noise: drop_prob outside [0,1]");
    if (clutter_rate < 0.0) throw ValidationError("noise: clutter_rate must be >= 0");
    if (score_jitter < 0.0) throw ValidationError("noise: score_jitter must be >= 0");
  }
};

// Detector output for one scene; step_velocities is parallel to detections.
struct DetScene {
  std::string scene_id;
  std::vector<Detection> detections;
  std::vector<std::vector<Vec2>> step_velocities;
  std::vector<FutureDetection> future_detections;
};

namespace detail {
inline double noisy_score(double err, const NoiseModel& noise, Rng& rng) {
  const double base = noise.pos_sigma > 0.0 ? 1.0 - err / (3.0 * noise.pos_sigma) : 1.0;
  const double jitter = noise.score_jitter * rng.uniform();
  return std::clamp(base - jitter, 0.05, 1.0);
}
}  // namespace detail

// Per complete trajectory: with probability 1-drop_prob a current-frame
// detection at the true center plus isotropic Gaussian noise, a noisy
// velocity, per-step velocities for forward integration, and (independently
// dropped) a future detection at offset T with noisy backward offsets.
// Clutter is Poisson per frame, uniform over the extent, with low scores and
// stationary chains. Fully reproducible from noise.seed.
inline DetScene simulate_detector(const std::vector<GtTrajectory>& gts, const NoiseModel& noise,
                                  const Timeline& tl, double extent = 100.0) {
  noise.validate();
  Rng rng(noise.seed);
  DetScene out;
  const double step_noise = noise.vel_sigma * tl.dt;

  for (const GtTrajectory& gt : gts) {
    const Vec2 v0 = trajectory_velocity0(gt, tl);
    if (!rng.bernoulli(noise.drop_prob)) {
      const Vec2 err{rng.normal(0.0, noise.pos_sigma), rng.normal(0.0, noise.pos_sigma)};
      Detection det;
      det.box = gt.first_box();
      det.box.cx += err.x;
      det.box.cy += err.y;
      det.velocity = v0 + Vec2{rng.normal(0.0, noise.vel_sigma), rng.normal(0.0, noise.vel_sigma)};
      det.score = detail::noisy_score(err.norm(), noise, rng);
      std::vector<Vec2> steps;
      if (gt.complete) {
        steps.reserve(tl.horizon_steps);
        for (int t = 1; t <= tl.horizon_steps; ++t) {
          const Vec2 v = (gt.boxes[t].box.center() - gt.boxes[t - 1].box.center()) * (1.0 / tl.dt);
          steps.push_back(v + Vec2{rng.normal(0.0, noise.vel_sigma), rng.normal(0.0, noise.vel_sigma)});
        }
      }
      out.detections.push_back(det);
      out.step_velocities.push_back(std::move(steps));
    }
    if (gt.complete && !rng.bernoulli(noise.drop_prob)) {
      const Vec2 err{rng.normal(0.0, noise.pos_sigma), rng.normal(0.0, noise.pos_sigma)};
      FutureDetection fd;
      fd.position = gt.boxes[tl.horizon_steps].box.center() + err;
      fd.score = detail::noisy_score(err.norm(), noise, rng);
      fd.back_offsets.reserve(tl.horizon_steps);
      for (int j = 0; j < tl.horizon_steps; ++j) {
        const int t = tl.horizon_steps - j;
        const Vec2 back = gt.boxes[t - 1].box.center() - gt.boxes[t].box.center();
        fd.back_offsets.push_back(back +
                                  Vec2{rng.normal(0.0, step_noise), rng.normal(0.0, step_noise)});
      }
      out.future_detections.push_back(std::move(fd));
    }
  }

  const double half = extent / 2.0;
  const int n_clutter = rng.poisson(noise.clutter_rate);
  for (int i = 0; i < n_clutter; ++i) {
    Detection det;
    det.box = BevBox::make(rng.uniform(-half, half), rng.uniform(-half, half), 4.6, 2.0,
                           rng.uniform(-M_PI, M_PI));
    det.velocity = {rng.normal(0.0, noise.vel_sigma), rng.normal(0.0, noise.vel_sigma)};
    det.score = rng.uniform(noise.clutter_score_range[0], noise.clutter_score_range[1]);
    out.detections.push_back(det);
    out.step_velocities.emplace_back(tl.horizon_steps, Vec2{0.0, 0.0});
  }
  const int n_future_clutter = rng.poisson(noise.clutter_rate);
  for (int i = 0; i < n_future_clutter; ++i) {
    FutureDetection fd;
    fd.position = {rng.uniform(-half, half), rng.uniform(-half, half)};
    fd.score = rng.uniform(noise.clutter_score_range[0], noise.clutter_score_range[1]);
    fd.back_offsets.reserve(tl.horizon_steps);
    for (int j = 0; j < tl.horizon_steps; ++j) {
      fd.back_offsets.push_back({rng.normal(0.0, step_noise), rng.normal(0.0, step_noise)});
    }
    out.future_detections.push_back(std::move(fd));
  }
  return out;
}

// Perfect predictions read off the ground truth; one candidate per complete
// trajectory with unit scores.
inline std::vector<ForecastSet> oracle_forecasts(const std::vector<GtTrajectory>& gts,
                                                 const Timeline& tl) {
  std::vector<ForecastSet> out;
  for (const GtTrajectory& gt : gts) {
    if (!gt.complete) continue;
    ForecastCandidate cand;
    cand.forecast_score = 1.0;
    cand.waypoints.reserve(tl.horizon_steps);
    for (int t = 1; t <= tl.horizon_steps; ++t) cand.waypoints.push_back(gt.boxes[t].box.center());
    out.push_back(ForecastSet{gt.first_box(), 1.0, {std::move(cand)}});
  }
  return out;
}

struct SynthConfig {
  int n_scenes = 100;
  Timeline timeline;
  SceneSamplerParams sampler;
  NoiseModel noise;
};

struct SynthOutput {
  std::vector<GtScene> gt_scenes;
  std::vector<DetScene> det_scenes;
};

// Scene i uses independent RNG streams derived from (seed, i), so thread
// count cannot change the output.
inline SynthOutput run_synth(const SynthConfig& cfg, std::uint64_t seed, unsigned threads = 1) {
  cfg.timeline.validate();
  cfg.sampler.validate();
  cfg.noise.validate();
  SynthOutput out;
  out.gt_scenes.resize(cfg.n_scenes);
  out.det_scenes.resize(cfg.n_scenes);
  parallel_for(cfg.n_scenes, threads, [&](std::size_t i) {
    Rng rng = Rng::for_stream(seed, 2 * i);
    const std::string scene_id = "scene_" + std::to_string(i);
    const auto specs = sample_scene_specs(cfg.sampler, cfg.timeline, rng);
    GtScene gt{scene_id, generate_scene(specs, cfg.timeline, scene_id)};
    NoiseModel scene_noise = cfg.noise;
    scene_noise.seed = Rng::for_stream(seed, 2 * i + 1).next_u64();
    DetScene det = simulate_detector(gt.trajectories, scene_noise, cfg.timeline, cfg.sampler.extent);
    det.scene_id = scene_id;
    out.gt_scenes[i] = std::move(gt);
    out.det_scenes[i] = std::move(det);
  });
  return out;
}

struct BreakdownConfig {
  SynthConfig synth;
  int k = 1;
  double stationarity_overlap_radius = 1.0;
  double stationarity_moving_penalty = 0.1;
};

struct BreakdownRow {
  std::string method;
  std::array<std::optional<double>, kNumSubclasses> ap_f;
  double map_f = 0.0;
  LegacyMetrics legacy;
};

struct BreakdownTable {
  std::vector<BreakdownRow> rows;  // constant position (reranked), constant velocity, oracle
  std::array<std::size_t, kNumSubclasses> gt_counts{};
  // Speed statistics over the whole population, parked agents included. The
  // median is the speed of the typical agent (zero whenever most of the
  // population is parked); the mean is dominated by the movers.
  double mean_agent_speed = 0.0;
  double median_agent_speed = 0.0;
  double vel_sigma = 0.0;
};

// Runs the three reference forecasters over one synthetic population and
// reports legacy displacement metrics next to mAP_f.
inline BreakdownTable run_breakdown_experiment(const BreakdownConfig& cfg, std::uint64_t seed,
                                               unsigned threads = 1) {
  const SynthOutput world = run_synth(cfg.synth, seed, threads);

  std::vector<PredScene> const_pos, const_vel, oracle;
  std::vector<double> speeds;
  for (std::size_t i = 0; i < world.gt_scenes.size(); ++i) {
    const GtScene& gt = world.gt_scenes[i];
    const DetScene& det = world.det_scenes[i];
    for (const GtTrajectory& traj : gt.trajectories) {
      speeds.push_back(trajectory_velocity0(traj, cfg.synth.timeline).norm());
    }
    const auto reranked =
        stationarity_rerank(det.detections, det.future_detections,
                            cfg.stationarity_overlap_radius, cfg.stationarity_moving_penalty);
    const_pos.push_back(PredScene{gt.scene_id, constant_position(reranked, cfg.synth.timeline)});
    const_vel.push_back(PredScene{gt.scene_id, constant_velocity(det.detections, cfg.synth.timeline)});
    oracle.push_back(PredScene{gt.scene_id, oracle_forecasts(gt.trajectories, cfg.synth.timeline)});
  }

  EvalConfig eval_cfg = EvalConfig::for_profile(ClassProfile::kCar, cfg.synth.timeline, cfg.k);

  BreakdownTable table;
  table.gt_counts = detail::pooled_gt_counts(world.gt_scenes);
  if (!speeds.empty()) {
    double sum = 0.0;
    for (double s : speeds) sum += s;
    table.mean_agent_speed = sum / speeds.size();
    std::nth_element(speeds.begin(), speeds.begin() + speeds.size() / 2, speeds.end());
    table.median_agent_speed = speeds[speeds.size() / 2];
  }
  table.vel_sigma = cfg.synth.noise.vel_sigma;

  const std::array<std::pair<std::string, const std::vector<PredScene>*>, 3> methods{
      {{"constant_position+stationarity", &const_pos},
       {"constant_velocity", &const_vel},
       {"oracle", &oracle}}};
  for (const auto& [name, preds] : methods) {
    const EvalReport report = evaluate(world.gt_scenes, *preds, eval_cfg, threads);
    BreakdownRow row;
    row.method = name;
    for (int s = 0; s < kNumSubclasses; ++s) row.ap_f[s] = report.subclasses[s].ap_f;
    row.map_f = report.map_f;
    row.legacy = report.legacy;
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string render_breakdown(const BreakdownTable& t) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line),
                "population: %zu static / %zu linear / %zu non-linear   speed median %.2f / "
                "mean %.2f m/s   vel_sigma %.2f m/s\n",
                t.gt_counts[0], t.gt_counts[1], t.gt_counts[2], t.median_agent_speed,
                t.mean_agent_speed, t.vel_sigma);
  out += line;
  std::snprintf(line, sizeof(line), "%-32s %7s %7s %7s %7s %9s %9s %6s\n", "method", "APf:st",
                "APf:lin", "APf:nl", "mAP_f", "ADE(avgR)", "FDE(avgR)", "miss");
  out += line;
  for (const BreakdownRow& row : t.rows) {
    std::snprintf(line, sizeof(line), "%-32s %7s %7s %7s %7.3f %9s %9s %6s\n", row.method.c_str(),
                  detail::fmt3(row.ap_f[0]).c_str(), detail::fmt3(row.ap_f[1]).c_str(),
                  detail::fmt3(row.ap_f[2]).c_str(), row.map_f,
                  detail::fmt3(row.legacy.ade_avg_recall).c_str(),
                  detail::fmt3(row.legacy.fde_avg_recall).c_str(),
                  detail::fmt3(row.legacy.miss_rate).c_str());
    out += line;
  }
  return out;
}

}  // namespace foreval
