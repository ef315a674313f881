#include "augplan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "augplan/config.hpp"

namespace augplan {
namespace {

constexpr int kSubsteps = 10;

bool CloseTo(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace

std::string_view ToString(Mode mode) {
  switch (mode) {
    case Mode::kGroundTruth:
      return "GroundTruth";
    case Mode::kSparse:
      return "Sparse";
    case Mode::kAugmented:
      return "Augmented";
  }
  return "";
}

Mode ParseMode(std::string_view text) {
  if (text == "GroundTruth" || text == "gt") return Mode::kGroundTruth;
  if (text == "Sparse" || text == "sparse") return Mode::kSparse;
  if (text == "Augmented" || text == "augmented") return Mode::kAugmented;
  throw Error(ErrorCode::kValidation, "unknown mode '" + std::string(text) + "'");
}

std::string_view ToString(FailureReason reason) {
  switch (reason) {
    case FailureReason::kNone:
      return "";
    case FailureReason::kTimeout:
      return "timeout";
    case FailureReason::kPlannerStuck:
      return "planner-stuck";
    case FailureReason::kCollision:
      return "collision";
  }
  return "";
}

void ExperimentConfig::Validate() const {
  sparsify.Validate();
  sparse_reference.Validate();
  if (completer) completer->Validate();
  integration.Validate(voxel_size);
  esdf.Validate();
  planner.Validate();
  camera.Validate();
  if (!(voxel_size > 0.0)) {
    throw Error(ErrorCode::kValidation, "voxel_size must be > 0");
  }
  if (pixel_stride < 1) {
    throw Error(ErrorCode::kValidation, "pixel_stride must be >= 1");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kValidation, "epsilon must be > 0");
  if (!(timeout > 0.0)) throw Error(ErrorCode::kValidation, "timeout must be > 0");
  if (!(sense_rate > 0.0) || !(plan_rate > 0.0) || !(log_rate > 0.0)) {
    throw Error(ErrorCode::kValidation, "rates must be > 0");
  }
  if (plan_rate > sense_rate) {
    throw Error(ErrorCode::kValidation, "plan_rate must not exceed sense_rate");
  }
  if (log_rate > sense_rate * kSubsteps) {
    throw Error(ErrorCode::kValidation, "log_rate is finer than the motion step");
  }
  if (!(spawn_clear_radius >= 0.0)) {
    throw Error(ErrorCode::kValidation, "spawn_clear_radius must be >= 0");
  }
  if (!(stuck_timeout > 0.0)) {
    throw Error(ErrorCode::kValidation, "stuck_timeout must be > 0");
  }
}

double LoggedPathLength(const std::vector<TrajectorySample>& samples,
                        const Vec3& goal) {
  if (samples.empty()) return 0.0;
  double len = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    len += (samples[i].position - samples[i - 1].position).norm();
  }
  return len + (samples.back().position - goal).norm();
}

std::vector<ObservedPoint> ObserveFrame(const RenderedFrame& frame,
                                        const Pose& pose, Mode mode,
                                        const ExperimentConfig& cfg,
                                        std::uint64_t seed,
                                        std::uint64_t frame_id) {
  std::vector<ObservedPoint> points;
  switch (mode) {
    case Mode::kGroundTruth:
      points = BackprojectFrame(frame.depth, nullptr, pose, cfg.camera,
                                cfg.pixel_stride);
      break;
    case Mode::kSparse: {
      SparsifyConfig sc = cfg.sparse_reference;
      sc.seed = DeriveSeed(seed, sc.seed);
      const DepthFrame sparse = Sparsify(frame.depth, frame.gray, sc, frame_id);
      points = BackprojectFrame(sparse, nullptr, pose, cfg.camera,
                                cfg.pixel_stride);
      break;
    }
    case Mode::kAugmented: {
      if (!cfg.completer) {
        throw Error(ErrorCode::kValidation, "Augmented mode needs a completer");
      }
      SparsifyConfig sc = cfg.sparsify;
      sc.seed = DeriveSeed(seed, sc.seed);
      const DepthFrame sparse = Sparsify(frame.depth, frame.gray, sc, frame_id);
      if (CountValid(MakeValidityMask(sparse)) == 0) break;
      const AugmentedFrame aug =
          Complete(*cfg.completer, frame.gray, sparse, frame_id);
      points = BackprojectFrame(aug.depth, &aug.provenance, pose, cfg.camera,
                                cfg.pixel_stride);
      break;
    }
  }
  return points;
}

TsdfGrid BuildMap(const Scene& scene, std::span<const Pose> poses, Mode mode,
                  const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.Validate();
  TsdfGrid tsdf(GridGeometry::Covering(scene.bounds, cfg.voxel_size),
                cfg.integration.delta_trunc);
  for (std::size_t k = 0; k < poses.size(); ++k) {
    const RenderedFrame frame = Render(scene, poses[k], cfg.camera);
    tsdf.Integrate(poses[k].translation,
                   ObserveFrame(frame, poses[k], mode, cfg, seed, k),
                   cfg.integration);
  }
  return tsdf;
}

RunRecord RunEpisode(const Scene& scene, const Vec3& start, const Vec3& goal,
                     Mode mode, const ExperimentConfig& cfg,
                     std::uint64_t seed) {
  cfg.Validate();
  if (mode == Mode::kAugmented && !cfg.completer) {
    throw Error(ErrorCode::kValidation, "Augmented mode needs a completer");
  }
  RunRecord rec;
  rec.mode = mode;
  rec.seed = seed;
  rec.start = start;
  rec.goal = goal;

  Vec3 pos = start;
  rec.samples.push_back({0.0, pos});
  auto finish = [&](bool success, FailureReason reason, double t) {
    rec.success = success;
    rec.failure = reason;
    rec.sim_time = t;
    if (!CloseTo(rec.samples.back().t, t)) rec.samples.push_back({t, pos});
    rec.path_length = LoggedPathLength(rec.samples, goal);
    const double direct = (start - goal).norm();
    rec.relative_length = direct > 0.0 ? rec.path_length / direct : 0.0;
    return rec;
  };
  if ((pos - goal).norm() <= cfg.epsilon) {
    return finish(true, FailureReason::kNone, 0.0);
  }

  TsdfGrid tsdf(GridGeometry::Covering(scene.bounds, cfg.voxel_size),
                cfg.integration.delta_trunc);
  EsdfConfig esdf_cfg = cfg.esdf;
  const Sphere spawn_ball[1] = {{start, cfg.spawn_clear_radius}};
  Rng planner_rng(DeriveSeed(seed, 0x91a7));

  const double dt = 1.0 / cfg.sense_rate;
  const double h = dt / kSubsteps;
  const long total_substeps = static_cast<long>(std::ceil(cfg.timeout / h - 1e-9));
  const long log_every =
      std::max(1L, std::lround(1.0 / (cfg.log_rate * h)));
  const long plan_every =
      std::max(1L, std::lround(cfg.sense_rate / cfg.plan_rate));

  const Vec3 to_goal = goal - start;
  double yaw = std::atan2(to_goal.y(), to_goal.x());
  Trajectory traj;
  double last_active = 0.0;

  for (long tick = 0;; ++tick) {
    const long s0 = tick * kSubsteps;
    if (s0 >= total_substeps) break;
    const double t = static_cast<double>(s0) * h;

    // Sense and fuse.
    const Pose pose = Pose::LookingAlong(pos, yaw);
    const RenderedFrame frame = Render(scene, pose, cfg.camera);
    const std::vector<ObservedPoint> points = ObserveFrame(
        frame, pose, mode, cfg, seed, static_cast<std::uint64_t>(tick));
    tsdf.Integrate(pos, points, cfg.integration);
    esdf_cfg.robot_pos = pos;
    const EsdfGrid esdf = ComputeEsdf(tsdf, esdf_cfg, spawn_ball);

    // Drop the current plan if the updated map invalidates what is left.
    if (!traj.empty() && t < traj.EndTime()) {
      const std::vector<Vec3> rest = traj.RemainingPolyline(t);
      bool clear = true;
      for (const Vec3& p : rest) clear = clear && esdf.InDomain(p);
      // A robot inside the margin band is only required to stay clear of R.
      const double radius =
          clear && esdf.Distance(pos) < cfg.planner.ClearanceRadius()
              ? cfg.planner.R
              : cfg.planner.ClearanceRadius();
      if (!clear ||
          !ClearanceCheck(esdf, rest, radius, cfg.planner.check_step)) {
        traj = Trajectory();
      }
    }
    if (tick % plan_every == 0) {
      const IntermediateGoal ig = SelectIntermediateGoal(
          esdf, tsdf, pos, goal, cfg.planner, planner_rng);
      if (ig.choice != GoalChoice::kStay && (ig.point - pos).norm() > 1e-9) {
        LocalPlanResult lp =
            LocalPlan(esdf, pos, ig.point, cfg.planner,
                      DeriveSeed(seed, 0x1000 + static_cast<std::uint64_t>(tick)),
                      t);
        if (lp.status == PlanStatus::kOk) traj = std::move(lp.trajectory);
      }
    }
    const bool active = !traj.empty() && t < traj.EndTime();
    if (active) {
      last_active = t;
    } else if (t - last_active >= cfg.stuck_timeout) {
      return finish(false, FailureReason::kPlannerStuck, t);
    }

    // Move.
    const Vec3 tick_start = pos;
    for (long s = s0 + 1; s <= s0 + kSubsteps && s <= total_substeps; ++s) {
      const double ts = static_cast<double>(s) * h;
      if (active) pos = traj.PositionAt(ts);
      if (DistanceToSurface(scene, pos) < cfg.planner.R ||
          Occupied(scene, pos)) {
        return finish(false, FailureReason::kCollision, ts);
      }
      if (s % log_every == 0) rec.samples.push_back({ts, pos});
      if ((pos - goal).norm() <= cfg.epsilon) {
        return finish(true, FailureReason::kNone, ts);
      }
    }
    const Vec3 moved = pos - tick_start;
    if (active && moved.head<2>().norm() > 1e-6) {
      yaw = std::atan2(moved.y(), moved.x());
    } else if (!active) {
      yaw += cfg.scan_step;
    }
  }
  return finish(false, FailureReason::kTimeout,
                static_cast<double>(total_substeps) * h);
}

std::vector<std::pair<std::size_t, std::size_t>> WaypointPairs(
    std::size_t count, bool ordered) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t g = 0; g < count; ++g) {
      if (s == g || (!ordered && g < s)) continue;
      pairs.emplace_back(s, g);
    }
  }
  return pairs;
}

std::vector<ModeAggregate> AggregateModes(std::span<const RunRecord> runs,
                                          std::span<const Mode> compared) {
  using Key = std::tuple<std::string, std::size_t, std::size_t>;
  const std::set<Mode> wanted(compared.begin(), compared.end());
  std::map<Key, std::set<Mode>> succeeded;
  for (const RunRecord& r : runs) {
    if (r.success && wanted.count(r.mode) > 0) {
      succeeded[{r.scene_id, r.start_index, r.goal_index}].insert(r.mode);
    }
  }
  std::vector<ModeAggregate> out;
  for (Mode mode : compared) {
    ModeAggregate agg;
    agg.mode = mode;
    double len = 0.0;
    double rel = 0.0;
    double time = 0.0;
    for (const RunRecord& r : runs) {
      if (r.mode != mode) continue;
      ++agg.runs;
      if (r.success) ++agg.successes;
      if (r.failure == FailureReason::kCollision) ++agg.collisions;
      if (r.failure == FailureReason::kTimeout) ++agg.timeouts;
      if (r.failure == FailureReason::kPlannerStuck) ++agg.stuck;
      if (!r.success) continue;
      const auto it = succeeded.find({r.scene_id, r.start_index, r.goal_index});
      if (it == succeeded.end() || it->second.size() != wanted.size()) {
        continue;
      }
      ++agg.common_count;
      len += r.path_length;
      rel += r.relative_length;
      time += r.sim_time;
    }
    agg.success_rate =
        agg.runs == 0 ? 0.0 : static_cast<double>(agg.successes) / agg.runs;
    if (agg.common_count > 0) {
      const auto n = static_cast<double>(agg.common_count);
      agg.mean_path_length = len / n;
      agg.mean_relative_length = rel / n;
      agg.mean_time = time / n;
    }
    out.push_back(agg);
  }
  return out;
}

void Aggregate(Report& report) {
  report.aggregates = AggregateModes(report.runs, report.modes);
}

Report RunMatrix(const Scene& scene, const WaypointSet& waypoints,
                 const ExperimentConfig& cfg, const MatrixOptions& options) {
  cfg.Validate();
  if (waypoints.points.size() < 2) {
    throw Error(ErrorCode::kValidation, "run_matrix needs at least 2 waypoints");
  }
  if (options.modes.empty()) {
    throw Error(ErrorCode::kValidation, "run_matrix needs at least one mode");
  }
  Report report;
  report.config_digest = ConfigDigest(cfg);
  report.modes = options.modes;
  const auto pairs = WaypointPairs(waypoints.points.size(), options.ordered_pairs);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [s, g] = pairs[k];
    const std::uint64_t pair_seed = DeriveSeed(cfg.seed, k);
    for (Mode mode : options.modes) {
      RunRecord rec = RunEpisode(scene, waypoints.points[s],
                                 waypoints.points[g], mode, cfg, pair_seed);
      rec.scene_id = options.scene_id;
      rec.start_index = s;
      rec.goal_index = g;
      report.runs.push_back(std::move(rec));
    }
  }
  Aggregate(report);
  return report;
}

Report MergeReports(const std::vector<Report>& reports) {
  Report out;
  for (const Report& r : reports) {
    if (out.modes.empty()) {
      out.modes = r.modes;
      out.config_digest = r.config_digest;
    } else if (r.modes != out.modes) {
      throw Error(ErrorCode::kValidation, "merged reports differ in modes");
    } else if (r.config_digest != out.config_digest) {
      throw Error(ErrorCode::kValidation, "merged reports differ in config");
    }
    out.runs.insert(out.runs.end(), r.runs.begin(), r.runs.end());
  }
  Aggregate(out);
  return out;
}

}  // namespace augplan
