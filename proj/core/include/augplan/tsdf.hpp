#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "augplan/frames.hpp"
#include "augplan/world.hpp"

namespace augplan {

using Index3 = Eigen::Vector3i;

/// Axis-aligned dense voxel lattice. Voxel (i, j, k) spans
/// [origin + (i, j, k) v, origin + (i + 1, j + 1, k + 1) v).
struct GridGeometry {
  Vec3 origin = Vec3::Zero();
  double voxel_size = 0.1;
  std::array<int, 3> dims{0, 0, 0};

  /// Smallest grid with the given voxel size whose extent covers `box`.
  static GridGeometry Covering(const Aabb& box, double voxel_size);

  void Validate() const;

  std::size_t VoxelCount() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t Index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  std::size_t Index(const Index3& v) const { return Index(v.x(), v.y(), v.z()); }
  Index3 Unflatten(std::size_t index) const;
  Vec3 Center(int i, int j, int k) const {
    return origin + voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  Vec3 Center(const Index3& v) const { return Center(v.x(), v.y(), v.z()); }
  Vec3 Extent() const {
    return voxel_size * Vec3(dims[0], dims[1], dims[2]);
  }
  bool Contains(const Index3& v) const {
    return v.x() >= 0 && v.y() >= 0 && v.z() >= 0 && v.x() < dims[0] &&
           v.y() < dims[1] && v.z() < dims[2];
  }
  /// Voxel containing `p`, or nullopt outside the grid.
  std::optional<Index3> VoxelOf(const Vec3& p) const;

  bool operator==(const GridGeometry& other) const {
    return origin == other.origin && voxel_size == other.voxel_size &&
           dims == other.dims;
  }
};

enum class WeightMode { kConstant, kQuadratic };

struct IntegrationConfig {
  double delta_trunc = 0.4;
  double w_pred = 0.1;
  WeightMode weight_mode = WeightMode::kConstant;
  double max_weight = 1e4;

  void Validate(double voxel_size) const;
  bool operator==(const IntegrationConfig&) const = default;
};

enum class VoxelClass : std::uint8_t { kUnobserved, kFree, kOccupied };

/// Unobserved iff weight == 0; otherwise Free iff distance > t.
constexpr VoxelClass ClassifyVoxel(double distance, double weight, double t) {
  if (weight == 0.0) return VoxelClass::kUnobserved;
  return distance > t ? VoxelClass::kFree : VoxelClass::kOccupied;
}

/// A surface sample in world coordinates.
struct ObservedPoint {
  Vec3 point;
  Provenance provenance = Provenance::kMeasured;
};

struct IntegrationStats {
  std::size_t integrated = 0;
  /// Rays that never intersect the grid.
  std::size_t skipped = 0;
  std::size_t voxel_updates = 0;
};

class TsdfGrid {
 public:
  TsdfGrid() = default;
  TsdfGrid(const GridGeometry& geometry, double delta_trunc);

  const GridGeometry& geometry() const { return geometry_; }
  double delta_trunc() const { return delta_trunc_; }

  double distance(std::size_t index) const { return distance_[index]; }
  double weight(std::size_t index) const { return weight_[index]; }
  std::span<const double> distances() const { return distance_; }
  std::span<const double> weights() const { return weight_; }
  void Set(std::size_t index, double distance, double weight);

  VoxelClass Classify(std::size_t index, double t) const {
    return ClassifyVoxel(distance_[index], weight_[index], t);
  }

  /// Fuses the points observed from `sensor_origin`. Each ray is walked from
  /// the sensor to range z + delta_trunc with an exact voxel traversal.
  IntegrationStats Integrate(const Vec3& sensor_origin,
                             std::span<const ObservedPoint> points,
                             const IntegrationConfig& cfg);

  /// Voxels visited by the segment [from, to], in traversal order. Exposed
  /// for testing.
  std::vector<Index3> Traverse(const Vec3& from, const Vec3& to) const;

  std::vector<std::uint8_t> Encode() const;
  static TsdfGrid Decode(std::span<const std::uint8_t> bytes);
  void Write(const std::filesystem::path& path) const;
  static TsdfGrid Read(const std::filesystem::path& path);

 private:
  template <typename Visit>
  void Walk(const Vec3& from, const Vec3& dir, double length,
            Visit&& visit) const;

  GridGeometry geometry_;
  double delta_trunc_ = 0.4;
  std::vector<double> distance_;
  std::vector<double> weight_;
};

/// Back-projects every `stride`-th valid pixel into world coordinates. With a
/// provenance mask, Invalid pixels are skipped and the label is carried;
/// otherwise every valid pixel is Measured.
std::vector<ObservedPoint> BackprojectFrame(const DepthFrame& depth,
                                            const ProvenanceMask* provenance,
                                            const Pose& pose,
                                            const Intrinsics& intr,
                                            int stride = 1);

}  // namespace augplan
