#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "augplan/tsdf.hpp"

namespace augplan {

struct EsdfConfig {
  /// Free-space threshold used to classify TSDF voxels.
  double t = 0.2;
  /// Treat every Unobserved voxel as an obstacle.
  bool unknown_is_obstacle = true;
  Vec3 robot_pos = Vec3::Zero();
  /// Unobserved voxels with centers within this radius of the robot become
  /// obstacles even when unknown_is_obstacle is false.
  double unknown_sphere_radius = 0.0;
  double d_cap = 5.0;

  void Validate() const;
  bool operator==(const EsdfConfig&) const = default;
};

/// A ball known to be free of obstacles without having been observed.
struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Unsigned obstacle distance per voxel center, 0 inside obstacles, capped.
class EsdfGrid {
 public:
  EsdfGrid() = default;
  EsdfGrid(const GridGeometry& geometry, double d_cap,
           std::vector<double> distances);

  /// Exact Euclidean distance between voxel centers to the nearest voxel with
  /// obstacle[i] != 0 (separable lower-envelope transform).
  static EsdfGrid FromObstacles(const GridGeometry& geometry,
                                std::span<const std::uint8_t> obstacle,
                                double d_cap);

  const GridGeometry& geometry() const { return geometry_; }
  double d_cap() const { return d_cap_; }
  double At(std::size_t index) const { return distance_[index]; }
  std::span<const double> distances() const { return distance_; }

  /// True when `p` lies between the outermost voxel centers.
  bool InDomain(const Vec3& p) const;

  /// Trilinear interpolation of voxel-center values. Throws kOutOfGrid.
  double Distance(const Vec3& p) const;

  struct Sample {
    double distance = 0.0;
    /// Central differences with step v; points away from obstacles.
    Vec3 gradient = Vec3::Zero();
  };
  /// Requires `p` at least one voxel inside the interpolation domain.
  Sample Query(const Vec3& p) const;

  std::vector<std::uint8_t> Encode() const;
  static EsdfGrid Decode(std::span<const std::uint8_t> bytes);
  void Write(const std::filesystem::path& path) const;
  static EsdfGrid Read(const std::filesystem::path& path);

 private:
  GridGeometry geometry_;
  double d_cap_ = 5.0;
  std::vector<double> distance_;
};

/// 1 for voxels that count as obstacles under `cfg`. Unobserved voxels with
/// centers inside a `known_free` ball are never obstacles.
std::vector<std::uint8_t> ObstacleMask(const TsdfGrid& tsdf,
                                       const EsdfConfig& cfg,
                                       std::span<const Sphere> known_free = {});

EsdfGrid ComputeEsdf(const TsdfGrid& tsdf, const EsdfConfig& cfg,
                     std::span<const Sphere> known_free = {});

/// True iff the interpolated distance is >= radius at samples spaced at most
/// `step` apart along every segment, endpoints included. Throws kOutOfGrid.
bool ClearanceCheck(const EsdfGrid& esdf, std::span<const Vec3> polyline,
                    double radius, double step);

}  // namespace augplan
