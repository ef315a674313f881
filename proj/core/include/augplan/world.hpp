#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "augplan/frames.hpp"

namespace augplan {

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 Size() const { return max - min; }
  bool Contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  double Diameter() const { return Size().norm(); }
  bool operator==(const Aabb&) const = default;
};

/// Vertical cylinder standing on z_min.
struct Cylinder {
  Vec2 center = Vec2::Zero();
  double radius = 0.5;
  double z_min = 0.0;
  double height = 2.0;
  double albedo = 0.5;

  double z_max() const { return z_min + height; }
};

struct Box {
  Aabb extent;
  double albedo = 0.5;
};

/// The room enclosing the scene: four walls, floor and ceiling on the bounds.
struct Shell {
  double wall_albedo = 0.6;
  double floor_albedo = 0.35;
  double ceiling_albedo = 0.8;
  /// Rays leaving through an open ceiling return no depth.
  bool open_ceiling = false;
};

struct Scene {
  Aabb bounds;
  std::vector<Cylinder> cylinders;
  std::vector<Box> boxes;
  Shell shell;

  void Validate() const;
};

struct WaypointSet {
  std::vector<Vec3> points;
  double clearance = 0.0;
};

struct LightModel {
  /// Direction the light travels (unit).
  Vec3 direction = Vec3(0.3, 0.2, -1.0).normalized();
  double ambient = 0.3;

  void Validate() const;
};

struct RayHit {
  double t = 0.0;       // ray parameter; equals z-depth for camera pixel rays
  Vec3 normal;          // unit, facing the ray origin
  double albedo = 0.0;
};

/// Nearest intersection of origin + t * direction (t > 0) with the scene.
std::optional<RayHit> CastRay(const Scene& scene, const Vec3& origin,
                              const Vec3& direction);

struct RenderedFrame {
  DepthFrame depth;
  GrayFrame gray;
};

RenderedFrame Render(const Scene& scene, const Pose& pose,
                     const Intrinsics& intr, const LightModel& light = {});
DepthFrame RenderDepth(const Scene& scene, const Pose& pose,
                       const Intrinsics& intr);
GrayFrame RenderGray(const Scene& scene, const Pose& pose,
                     const Intrinsics& intr, const LightModel& light = {});

/// True inside any primitive or outside the room bounds.
bool Occupied(const Scene& scene, const Vec3& point);

/// Exact unsigned distance to the nearest surface (primitives and shell).
double DistanceToSurface(const Scene& scene, const Vec3& point);

struct ForestOptions {
  Aabb bounds{Vec3(0.0, 0.0, 0.0), Vec3(15.0, 12.0, 4.0)};
  int n_cylinders = 12;
  double radius_min = 0.3;
  double radius_max = 0.6;
  double cylinder_height = 2.0;
  int n_boxes = 2;
  double box_size_min = 0.5;
  double box_size_max = 1.5;
  double box_height_min = 0.5;
  double box_height_max = 2.0;
  /// Free space kept between obstacle footprints and to the walls.
  double obstacle_gap = 1.0;
  int waypoint_count = 12;
  double clearance = 0.8;
  double waypoint_height = 1.0;
  double min_waypoint_separation = 2.5;
  int max_attempts = 20000;

  bool operator==(const ForestOptions&) const = default;
};

struct FourRoomsOptions {
  Aabb bounds{Vec3(0.0, 0.0, 0.0), Vec3(12.0, 12.0, 3.0)};
  double wall_thickness = 0.2;
  double door_width = 1.5;
  int boxes_per_room = 1;
  double box_size_min = 0.5;
  double box_size_max = 1.2;
  double box_height_min = 0.6;
  double box_height_max = 1.5;
  double obstacle_gap = 1.0;
  int waypoint_count = 7;
  double clearance = 0.8;
  double waypoint_height = 1.0;
  double min_waypoint_separation = 2.5;
  int max_attempts = 20000;

  bool operator==(const FourRoomsOptions&) const = default;
};

/// Throws kPlacementFailure if rejection sampling runs out of attempts.
std::pair<Scene, WaypointSet> GenerateCylinderForest(
    std::uint64_t seed, const ForestOptions& options = {});
std::pair<Scene, WaypointSet> GenerateFourRooms(
    std::uint64_t seed, const FourRoomsOptions& options = {});

/// Scripted inspection loop: poses on a rectangle inset from the walls,
/// facing along the loop and alternately toward the room center. Poses closer
/// than `min_clearance` to any surface are dropped.
std::vector<Pose> SurveyPoses(const Scene& scene, int n_poses, double height,
                              double inset, double min_clearance);

nlohmann::json SceneToJson(const Scene& scene, const WaypointSet& waypoints);
std::pair<Scene, WaypointSet> SceneFromJson(const nlohmann::json& doc);

}  // namespace augplan
