#include "augplan/tsdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "augplan/frame_io.hpp"
#include "byte_io.hpp"

namespace augplan {
namespace {

constexpr std::uint8_t kTsdfVersion = 1;

}  // namespace

GridGeometry GridGeometry::Covering(const Aabb& box, double voxel_size) {
  if (!(voxel_size > 0.0)) {
    throw Error(ErrorCode::kValidation, "voxel size must be positive");
  }
  GridGeometry g;
  g.origin = box.min;
  g.voxel_size = voxel_size;
  const Vec3 size = box.Size();
  for (int a = 0; a < 3; ++a) {
    // The small slack keeps exact multiples from gaining a voxel.
    g.dims[a] = std::max(
        1, static_cast<int>(std::ceil(size[a] / voxel_size - 1e-9)));
  }
  return g;
}

void GridGeometry::Validate() const {
  if (!(voxel_size > 0.0) || !origin.allFinite()) {
    throw Error(ErrorCode::kValidation, "grid needs a finite origin and v > 0");
  }
  for (int d : dims) {
    if (d <= 0) throw Error(ErrorCode::kValidation, "grid dims must be > 0");
  }
}

Index3 GridGeometry::Unflatten(std::size_t index) const {
  const auto nx = static_cast<std::size_t>(dims[0]);
  const auto ny = static_cast<std::size_t>(dims[1]);
  return Index3(static_cast<int>(index % nx),
                static_cast<int>((index / nx) % ny),
                static_cast<int>(index / (nx * ny)));
}

std::optional<Index3> GridGeometry::VoxelOf(const Vec3& p) const {
  const Vec3 rel = (p - origin) / voxel_size;
  const Index3 v(static_cast<int>(std::floor(rel.x())),
                 static_cast<int>(std::floor(rel.y())),
                 static_cast<int>(std::floor(rel.z())));
  if (!rel.allFinite() || !Contains(v)) return std::nullopt;
  return v;
}

void IntegrationConfig::Validate(double voxel_size) const {
  if (!(delta_trunc >= 2.0 * voxel_size)) {
    throw Error(ErrorCode::kValidation, "delta_trunc must be at least 2 v");
  }
  if (!(w_pred > 0.0 && w_pred <= 1.0)) {
    throw Error(ErrorCode::kValidation, "w_pred must lie in (0, 1]");
  }
  if (!(max_weight > 0.0)) {
    throw Error(ErrorCode::kValidation, "max_weight must be positive");
  }
}

TsdfGrid::TsdfGrid(const GridGeometry& geometry, double delta_trunc)
    : geometry_(geometry), delta_trunc_(delta_trunc) {
  geometry_.Validate();
  if (!(delta_trunc > 0.0)) {
    throw Error(ErrorCode::kValidation, "delta_trunc must be positive");
  }
  distance_.assign(geometry_.VoxelCount(), 0.0);
  weight_.assign(geometry_.VoxelCount(), 0.0);
}

void TsdfGrid::Set(std::size_t index, double distance, double weight) {
  if (weight < 0.0 || (weight > 0.0 && std::abs(distance) > delta_trunc_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "voxel value violates the truncation band or weight sign");
  }
  distance_.at(index) = distance;
  weight_.at(index) = weight;
}

template <typename Visit>
void TsdfGrid::Walk(const Vec3& from, const Vec3& dir, double length,
                    Visit&& visit) const {
  const Vec3 lo = geometry_.origin;
  const Vec3 hi = geometry_.origin + geometry_.Extent();
  double t0 = 0.0;
  double t1 = length;
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (from[a] < lo[a] || from[a] >= hi[a]) return;
      continue;
    }
    double ta = (lo[a] - from[a]) / dir[a];
    double tb = (hi[a] - from[a]) / dir[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1) return;

  const double v = geometry_.voxel_size;
  const Vec3 entry = from + t0 * dir;
  Index3 idx;
  std::array<int, 3> step{};
  std::array<double, 3> t_max{};
  std::array<double, 3> t_delta{};
  for (int a = 0; a < 3; ++a) {
    idx[a] = std::clamp(static_cast<int>(std::floor((entry[a] - lo[a]) / v)),
                        0, geometry_.dims[a] - 1);
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_max[a] = (lo[a] + (idx[a] + 1) * v - from[a]) / dir[a];
      t_delta[a] = v / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (lo[a] + idx[a] * v - from[a]) / dir[a];
      t_delta[a] = -v / dir[a];
    } else {
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }
  while (true) {
    visit(idx);
    int a = 0;
    if (t_max[1] < t_max[a]) a = 1;
    if (t_max[2] < t_max[a]) a = 2;
    if (t_max[a] > t1) break;
    idx[a] += step[a];
    if (idx[a] < 0 || idx[a] >= geometry_.dims[a]) break;
    t_max[a] += t_delta[a];
  }
}

std::vector<Index3> TsdfGrid::Traverse(const Vec3& from, const Vec3& to) const {
  std::vector<Index3> out;
  const Vec3 seg = to - from;
  const double len = seg.norm();
  if (!(len > 0.0)) {
    if (auto v = geometry_.VoxelOf(from)) out.push_back(*v);
    return out;
  }
  Walk(from, seg / len, len, [&](const Index3& v) { out.push_back(v); });
  return out;
}

IntegrationStats TsdfGrid::Integrate(const Vec3& sensor_origin,
                                     std::span<const ObservedPoint> points,
                                     const IntegrationConfig& cfg) {
  cfg.Validate(geometry_.voxel_size);
  if (cfg.delta_trunc != delta_trunc_) {
    throw Error(ErrorCode::kValidation,
                "integration delta_trunc differs from the grid's");
  }
  const double delta = delta_trunc_;
  IntegrationStats stats;
  for (const ObservedPoint& obs : points) {
    if (obs.provenance == Provenance::kInvalid) {
      throw Error(ErrorCode::kInvalidArgument,
                  "points must be Measured or Predicted");
    }
    const Vec3 ray = obs.point - sensor_origin;
    const double z = ray.norm();
    if (!std::isfinite(z) || z == 0.0) {
      ++stats.skipped;
      continue;
    }
    const Vec3 dir = ray / z;
    const double w_point =
        obs.provenance == Provenance::kPredicted ? cfg.w_pred : 1.0;
    const double inv_z2 = 1.0 / (z * z);
    bool touched = false;
    Walk(sensor_origin, dir, z + delta, [&](const Index3& v) {
      touched = true;
      const Vec3 x = geometry_.Center(v);
      const double d =
          std::clamp(z - (x - sensor_origin).dot(dir), -delta, delta);
      double w = w_point;
      if (cfg.weight_mode == WeightMode::kQuadratic) {
        const double ramp =
            d >= -0.25 * delta ? 1.0 : (d + delta) / (0.75 * delta);
        w *= inv_z2 * ramp;
      }
      if (!(w > 0.0)) return;
      const std::size_t i = geometry_.Index(v);
      const double w_old = weight_[i];
      distance_[i] = (w_old * distance_[i] + w * d) / (w_old + w);
      weight_[i] = std::min(w_old + w, cfg.max_weight);
      ++stats.voxel_updates;
    });
    if (touched) {
      ++stats.integrated;
    } else {
      ++stats.skipped;
    }
  }
  return stats;
}

std::vector<std::uint8_t> TsdfGrid::Encode() const {
  detail::ByteWriter w(64 + 8 * distance_.size());
  w.Magic("TSDF");
  w.U8(kTsdfVersion);
  for (int a = 0; a < 3; ++a) w.F64(geometry_.origin[a]);
  w.F64(geometry_.voxel_size);
  for (int a = 0; a < 3; ++a) w.U32(static_cast<std::uint32_t>(geometry_.dims[a]));
  w.F64(delta_trunc_);
  for (std::size_t i = 0; i < distance_.size(); ++i) {
    w.F32(static_cast<float>(distance_[i]));
    w.F32(static_cast<float>(weight_[i]));
  }
  return w.Take();
}

TsdfGrid TsdfGrid::Decode(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.ExpectMagic("TSDF");
  if (r.U8() != kTsdfVersion) {
    throw Error(ErrorCode::kMalformedHeader, "unsupported TSDF version");
  }
  GridGeometry g;
  for (int a = 0; a < 3; ++a) g.origin[a] = r.F64();
  g.voxel_size = r.F64();
  for (int a = 0; a < 3; ++a) {
    const std::uint32_t d = r.U32();
    if (d == 0 || d > (1u << 20)) {
      throw Error(ErrorCode::kMalformedHeader, "implausible grid dimension");
    }
    g.dims[a] = static_cast<int>(d);
  }
  const double delta = r.F64();
  TsdfGrid grid(g, delta);
  r.Need(8 * grid.distance_.size());
  for (std::size_t i = 0; i < grid.distance_.size(); ++i) {
    grid.distance_[i] = r.F32();
    grid.weight_[i] = r.F32();
  }
  r.ExpectEnd();
  return grid;
}

void TsdfGrid::Write(const std::filesystem::path& path) const {
  WriteBytes(path, Encode());
}

TsdfGrid TsdfGrid::Read(const std::filesystem::path& path) {
  return Decode(ReadBytes(path));
}

std::vector<ObservedPoint> BackprojectFrame(const DepthFrame& depth,
                                            const ProvenanceMask* provenance,
                                            const Pose& pose,
                                            const Intrinsics& intr,
                                            int stride) {
  if (stride < 1) {
    throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  }
  if (depth.width() != intr.width || depth.height() != intr.height ||
      (provenance != nullptr && !provenance->SameShape(depth))) {
    throw Error(ErrorCode::kResolutionMismatch,
                "depth, provenance and intrinsics disagree on resolution");
  }
  std::vector<ObservedPoint> points;
  for (int r = 0; r < depth.height(); r += stride) {
    for (int c = 0; c < depth.width(); c += stride) {
      const double z = depth(r, c);
      if (!(z > 0.0)) continue;
      const Provenance label =
          provenance != nullptr ? (*provenance)(r, c) : Provenance::kMeasured;
      if (label == Provenance::kInvalid) continue;
      points.push_back(
          {pose.Transform(Backproject(intr, r, c, z)), label});
    }
  }
  return points;
}

}  // namespace augplan
