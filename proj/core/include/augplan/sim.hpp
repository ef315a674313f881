#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "augplan/complete.hpp"
#include "augplan/esdf.hpp"
#include "augplan/plan.hpp"
#include "augplan/sparsify.hpp"
#include "augplan/tsdf.hpp"
#include "augplan/world.hpp"

namespace augplan {

enum class Mode { kGroundTruth, kSparse, kAugmented };

std::string_view ToString(Mode mode);
/// Accepts "GroundTruth"/"gt", "Sparse"/"sparse", "Augmented"/"augmented".
Mode ParseMode(std::string_view text);

enum class FailureReason { kNone, kTimeout, kPlannerStuck, kCollision };

std::string_view ToString(FailureReason reason);

struct ExperimentConfig {
  /// Input degradation for Augmented mode.
  SparsifyConfig sparsify;
  /// Degradation used by Sparse mode.
  SparsifyConfig sparse_reference{0.5, 7.0};
  /// Required for Augmented mode.
  std::optional<CompleterSpec> completer = CompleterSpec{};
  IntegrationConfig integration;
  /// robot_pos is overwritten with the vehicle position every tick.
  EsdfConfig esdf{0.2, true, Vec3::Zero(), 0.0, 7.0};
  PlannerConfig planner;
  double voxel_size = 0.1;
  Intrinsics camera = Intrinsics::Default();
  /// Integrate every n-th pixel in both image directions.
  int pixel_stride = 2;

  double epsilon = 0.25;
  double timeout = 40.0;
  double sense_rate = 5.0;
  double plan_rate = 5.0;
  double log_rate = 10.0;
  /// Seconds without an active trajectory before a run is abandoned.
  double stuck_timeout = 10.0;
  /// Yaw increment per sensing tick while hovering without a plan.
  double scan_step = 1.5707963267948966;
  /// Unobserved space within this radius of the spawn point counts as free.
  /// Must not exceed the start's true clearance; generated waypoints keep 0.8 m.
  double spawn_clear_radius = 0.8;
  std::uint64_t seed = 0;

  void Validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

struct TrajectorySample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
};

struct RunRecord {
  std::string scene_id;
  Mode mode = Mode::kGroundTruth;
  std::size_t start_index = 0;
  std::size_t goal_index = 0;
  std::uint64_t seed = 0;
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  bool success = false;
  FailureReason failure = FailureReason::kNone;
  double sim_time = 0.0;
  /// Sum of inter-sample distances plus the final distance to the goal.
  double path_length = 0.0;
  /// path_length / |start - goal|.
  double relative_length = 0.0;
  std::vector<TrajectorySample> samples;
};

/// Recomputes the length from the logged samples.
double LoggedPathLength(const std::vector<TrajectorySample>& samples,
                        const Vec3& goal);

/// World points a frame contributes under `mode`: all rendered depth for
/// GroundTruth, the sparsified reference setting for Sparse, the completed
/// frame with provenance for Augmented.
std::vector<ObservedPoint> ObserveFrame(const RenderedFrame& frame,
                                        const Pose& pose, Mode mode,
                                        const ExperimentConfig& cfg,
                                        std::uint64_t seed,
                                        std::uint64_t frame_id);

/// Renders and fuses one frame per pose, in order.
TsdfGrid BuildMap(const Scene& scene, std::span<const Pose> poses, Mode mode,
                  const ExperimentConfig& cfg, std::uint64_t seed);

/// One closed-loop episode. Outcomes are recorded, never thrown.
RunRecord RunEpisode(const Scene& scene, const Vec3& start, const Vec3& goal,
                     Mode mode, const ExperimentConfig& cfg,
                     std::uint64_t seed);

struct ModeAggregate {
  Mode mode = Mode::kGroundTruth;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  std::size_t collisions = 0;
  std::size_t timeouts = 0;
  std::size_t stuck = 0;
  /// Means over runs that succeeded in every compared mode.
  std::size_t common_count = 0;
  double mean_path_length = 0.0;
  double mean_relative_length = 0.0;
  double mean_time = 0.0;
};

struct Report {
  std::string config_digest;
  std::vector<Mode> modes;
  std::vector<RunRecord> runs;
  std::vector<ModeAggregate> aggregates;
};

/// Per-mode aggregates over `runs`. Means are taken over the runs in which
/// every mode of `compared` succeeded, matched by (scene_id, start_index,
/// goal_index).
std::vector<ModeAggregate> AggregateModes(std::span<const RunRecord> runs,
                                          std::span<const Mode> compared);

/// Fills report.aggregates from report.runs. Runs are matched across modes
/// by (scene_id, start_index, goal_index).
void Aggregate(Report& report);

struct MatrixOptions {
  std::vector<Mode> modes{Mode::kGroundTruth, Mode::kSparse, Mode::kAugmented};
  bool ordered_pairs = true;
  std::string scene_id = "scene";
};

/// Every (start, goal) waypoint pair under every mode. The pair seed is
/// derived from cfg.seed and the pair index, shared by all modes.
Report RunMatrix(const Scene& scene, const WaypointSet& waypoints,
                 const ExperimentConfig& cfg, const MatrixOptions& options);

/// Pairs visited by RunMatrix, in order.
std::vector<std::pair<std::size_t, std::size_t>> WaypointPairs(
    std::size_t count, bool ordered);

/// Concatenates reports with the same digest and modes and re-aggregates.
Report MergeReports(const std::vector<Report>& reports);

}  // namespace augplan
