#include "augplan/frames.hpp"

#include <cmath>
#include <numbers>

namespace augplan {

Intrinsics Intrinsics::FromHorizontalFov(int width, int height,
                                         double hfov_deg) {
  Intrinsics intr;
  intr.width = width;
  intr.height = height;
  const double half = hfov_deg * std::numbers::pi / 360.0;
  intr.fx = 0.5 * width / std::tan(half);
  intr.fy = intr.fx;
  intr.cx = 0.5 * (width - 1);
  intr.cy = 0.5 * (height - 1);
  intr.Validate();
  return intr;
}

void Intrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::kInvalidArgument,
                "principal point must lie inside the image");
  }
}

Pose Pose::LookingAlong(const Vec3& position, double yaw) {
  const Vec3 forward(std::cos(yaw), std::sin(yaw), 0.0);
  const Vec3 right(std::sin(yaw), -std::cos(yaw), 0.0);
  const Vec3 down(0.0, 0.0, -1.0);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  Pose pose;
  pose.translation = position;
  pose.rotation = Eigen::Quaterniond(r).normalized();
  return pose;
}

void Pose::Validate() const {
  if (!translation.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "pose translation not finite");
  }
  if (std::abs(rotation.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "pose quaternion must have unit norm");
  }
}

void ValidateDepth(const DepthFrame& depth) {
  for (const double d : depth.values()) {
    if (!std::isfinite(d) || d < 0.0) {
      throw Error(ErrorCode::kInvalidDepth,
                  "depth values must be finite and non-negative");
    }
  }
}

void ValidateGray(const GrayFrame& gray) {
  for (const double g : gray.values()) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "gray values must lie in [0, 1]");
    }
  }
}

ValidityMask MakeValidityMask(const DepthFrame& depth) {
  ValidityMask mask(depth.width(), depth.height(), 0);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    mask[i] = depth[i] > 0.0 ? 1 : 0;
  }
  return mask;
}

std::size_t CountValid(const ValidityMask& mask) {
  std::size_t n = 0;
  for (const auto bit : mask.values()) n += bit != 0;
  return n;
}

Vec3 Backproject(const Intrinsics& intr, double row, double col,
                 double depth) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw Error(ErrorCode::kInvalidDepth, "cannot backproject depth <= 0");
  }
  return PixelRay(intr, row, col) * depth;
}

Vec2 Project(const Intrinsics& intr, const Vec3& point_camera) {
  if (!(point_camera.z() > 0.0)) {
    throw Error(ErrorCode::kInvalidDepth, "cannot project point behind camera");
  }
  const double col = intr.fx * point_camera.x() / point_camera.z() + intr.cx;
  const double row = intr.fy * point_camera.y() / point_camera.z() + intr.cy;
  return Vec2(row, col);
}

void FrameSequence::Validate() const {
  intrinsics.Validate();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frames[i].pose.Validate();
    if (i > 0 && !(frames[i].timestamp > frames[i - 1].timestamp)) {
      throw Error(ErrorCode::kValidation,
                  "frame timestamps must be strictly increasing (frame " +
                      std::to_string(i) + ")");
    }
  }
}

}  // namespace augplan
