#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "augplan/esdf.hpp"
#include "augplan/tsdf.hpp"

namespace augplan {

struct RewardWeights {
  double w_goal = 1.0;
  double w_unk = 1.0;
  double w_clear = 0.5;

  bool operator==(const RewardWeights&) const = default;
};

struct PlannerConfig {
  /// Probability of heading for the (projected) global goal.
  double p_g = 0.5;
  double sample_radius = 4.0;
  int n_samples = 50;
  /// Collision radius.
  double R = 0.25;
  /// Extra clearance the planner keeps beyond R.
  double margin = 0.1;
  double horizon = 3.0;
  double v_max = 1.5;
  int rrt_iteration_budget = 20000;
  int local_iteration_budget = 2000;
  /// Spacing of clearance samples along segments.
  double check_step = 0.05;
  std::uint64_t seed = 0;
  RewardWeights weights;

  void Validate() const;
  double ClearanceRadius() const { return R + margin; }
  bool operator==(const PlannerConfig&) const = default;
};

/// Piecewise-linear trajectory with timestamps.
struct Trajectory {
  std::vector<Vec3> points;
  std::vector<double> times;

  /// Constant speed `v_max` along `polyline`, starting at `t0`.
  static Trajectory FromPolyline(std::span<const Vec3> polyline, double v_max,
                                 double t0 = 0.0);

  bool empty() const { return points.empty(); }
  double StartTime() const { return times.empty() ? 0.0 : times.front(); }
  double EndTime() const { return times.empty() ? 0.0 : times.back(); }
  double Duration() const { return EndTime() - StartTime(); }
  double Length() const;
  /// Position at time t, clamped to the endpoints.
  Vec3 PositionAt(double t) const;
  /// The part of the trajectory from time t on.
  std::vector<Vec3> RemainingPolyline(double t) const;
  /// Timestamps non-decreasing and segment speeds <= v_max + 1e-9.
  bool IsValid(double v_max) const;
};

double PolylineLength(std::span<const Vec3> polyline);

enum class PlanStatus {
  kOk,
  kNoPathFound,
  kInvalidStart,
  kFailureToProject,
  kNoLocalPath,
};

struct RrtOptions {
  double radius = 0.25;
  int iteration_budget = 20000;
  std::uint64_t seed = 0;
  double goal_bias = 0.05;
  double max_extension = 1.0;
  double check_step = 0.05;
};

struct PathResult {
  PlanStatus status = PlanStatus::kNoPathFound;
  std::vector<Vec3> path;
  int iterations = 0;
  std::size_t tree_size = 0;
};

/// True when `p` lies in the ESDF domain with clearance >= radius.
bool IsFree(const EsdfGrid& esdf, const Vec3& p, double radius);
/// Clearance check that reports false instead of throwing off-grid.
bool SegmentFree(const EsdfGrid& esdf, const Vec3& a, const Vec3& b,
                 double radius, double step);

/// Iteration-budgeted RRT* between start and goal. Samples the ESDF domain;
/// the result is line-of-sight pruned and passes ClearanceCheck at `radius`.
PathResult RrtStar(const EsdfGrid& esdf, const Vec3& start, const Vec3& goal,
                   const RrtOptions& options);

/// Random shortcutting: replaces stretches between two random arc-length
/// positions with straight segments when they stay clear.
std::vector<Vec3> Shortcut(const EsdfGrid& esdf, std::vector<Vec3> path,
                           double radius, double step, int attempts,
                           std::uint64_t seed);

/// `goal` if within `horizon`; else the first probe of a golden-angle spiral
/// (<= 64 directions within 60 degrees of the goal direction) at distance
/// `horizon` that has clearance >= R.
std::optional<Vec3> ProjectToHorizon(const EsdfGrid& esdf, const Vec3& current,
                                     const Vec3& goal, double horizon,
                                     double R);

enum class GoalChoice { kGlobal, kSampled, kStay };

struct IntermediateGoal {
  GoalChoice choice = GoalChoice::kStay;
  Vec3 point = Vec3::Zero();
  /// Reward of the chosen sample (kSampled only).
  double reward = 0.0;
};

/// Fraction of voxels with centers within `radius` of `x` that are
/// Unobserved. Only voxels inside the grid are counted.
double UnobservedFraction(const TsdfGrid& tsdf, const Vec3& x, double radius);

double Reward(const EsdfGrid& esdf, const TsdfGrid& tsdf, const Vec3& current,
              const Vec3& goal, const Vec3& x, const RewardWeights& weights);

/// With probability p_g the horizon projection of the goal; otherwise the
/// best-rewarded of n_samples feasible ball samples; otherwise stay. A
/// failed projection falls through to sampling.
IntermediateGoal SelectIntermediateGoal(const EsdfGrid& esdf,
                                        const TsdfGrid& tsdf,
                                        const Vec3& current,
                                        const Vec3& global_goal,
                                        const PlannerConfig& cfg, Rng& rng);

struct LocalPlanResult {
  PlanStatus status = PlanStatus::kNoLocalPath;
  Trajectory trajectory;
};

/// Climbs the ESDF gradient in check_step increments from a start whose
/// clearance lies in [R, R + margin) until it reaches R + margin. Returns the
/// climb (just `start` when no climb is needed), or nullopt when the start is
/// in collision or the climb stalls.
std::optional<std::vector<Vec3>> EscapeMargin(const EsdfGrid& esdf,
                                              const Vec3& start,
                                              const PlannerConfig& cfg);

/// Escape climb, then a straight segment if clear, else budgeted RRT* plus
/// shortcutting. Past the climb the trajectory keeps clearance
/// cfg.ClearanceRadius(); the climb itself keeps cfg.R.
LocalPlanResult LocalPlan(const EsdfGrid& esdf, const Vec3& start,
                          const Vec3& intermediate, const PlannerConfig& cfg,
                          std::uint64_t seed, double t0 = 0.0);

}  // namespace augplan
