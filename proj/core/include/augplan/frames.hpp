#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "augplan/common.hpp"

namespace augplan {

/// Pinhole intrinsics. Pixel (row i, column j); camera z along the optical
/// axis, x right, y down.
struct Intrinsics {
  double fx = 160.0;
  double fy = 160.0;
  double cx = 159.5;
  double cy = 119.5;
  int width = 320;
  int height = 240;

  /// 320x240 with a 90 degree horizontal field of view.
  static Intrinsics Default() { return Intrinsics{}; }

  /// Square pixels, principal point at the image center.
  static Intrinsics FromHorizontalFov(int width, int height, double hfov_deg);

  void Validate() const;

  bool operator==(const Intrinsics&) const = default;
};

/// Rigid transform world <- camera.
struct Pose {
  Vec3 translation = Vec3::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

  static Pose Identity() { return Pose{}; }

  /// Camera at `position` looking horizontally along `yaw` (radians, about
  /// world +z), with image "down" mapped to world -z.
  static Pose LookingAlong(const Vec3& position, double yaw);

  void Validate() const;

  /// p_world = R(q) * p_cam + t.
  Vec3 Transform(const Vec3& point_camera) const {
    return rotation * point_camera + translation;
  }
};

/// Row-major 2-D array. The tag keeps depth, gray, masks and scalar fields
/// from being mixed up.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        values_(static_cast<std::size_t>(CheckedArea(width, height)), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  T& operator()(int row, int col) { return values_[Index(row, col)]; }
  const T& operator()(int row, int col) const {
    return values_[Index(row, col)];
  }
  T& operator[](std::size_t index) { return values_[index]; }
  const T& operator[](std::size_t index) const { return values_[index]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  std::size_t Index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }
  bool InBounds(int row, int col) const {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  template <typename U, typename OtherTag>
  bool SameShape(const Raster<U, OtherTag>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Raster&) const = default;

 private:
  static long CheckedArea(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorCode::kInvalidArgument, "negative raster dimensions");
    }
    return static_cast<long>(width) * height;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

struct DepthTag;
struct GrayTag;
struct MaskTag;
struct FieldTag;

/// Depth in meters along the optical axis; exactly 0.0 marks an invalid pixel.
using DepthFrame = Raster<double, DepthTag>;
/// Intensity in [0, 1].
using GrayFrame = Raster<double, GrayTag>;
/// 1 where valid.
using ValidityMask = Raster<std::uint8_t, MaskTag>;
/// Generic per-pixel scalar (gradient magnitudes etc).
using ScalarField = Raster<double, FieldTag>;

/// Per-pixel origin of a depth value.
enum class Provenance : std::uint8_t {
  kInvalid = 0,
  kMeasured = 1,
  kPredicted = 2,
};

struct ProvenanceTag;
using ProvenanceMask = Raster<Provenance, ProvenanceTag>;

/// Throws kInvalidDepth unless every value is finite and non-negative.
void ValidateDepth(const DepthFrame& depth);
/// Throws kInvalidArgument unless every value lies in [0, 1].
void ValidateGray(const GrayFrame& gray);

ValidityMask MakeValidityMask(const DepthFrame& depth);
std::size_t CountValid(const ValidityMask& mask);

/// Pixel (row, col) at the given z-depth to a camera-frame point.
Vec3 Backproject(const Intrinsics& intr, double row, double col, double depth);

/// Camera-frame point to continuous (row, col). Requires z > 0.
Vec2 Project(const Intrinsics& intr, const Vec3& point_camera);

/// Unnormalized camera-frame ray whose z component is 1.
inline Vec3 PixelRay(const Intrinsics& intr, double row, double col) {
  return Vec3((col - intr.cx) / intr.fx, (row - intr.cy) / intr.fy, 1.0);
}

struct SequenceFrame {
  double timestamp = 0.0;
  Pose pose;
  std::string depth_file;
  std::string gray_file;
  /// Optional provenance mask for pre-completed frames.
  std::string provenance_file;
};

/// An ordered, timestamped list of frames with a shared resolution.
struct FrameSequence {
  Intrinsics intrinsics;
  std::vector<SequenceFrame> frames;
  /// Directory the relative file paths are resolved against.
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::string& relative) const {
    return base_dir / relative;
  }

  /// Intrinsics valid, poses valid and timestamps strictly increasing.
  void Validate() const;
};

}  // namespace augplan
