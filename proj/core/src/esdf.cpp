#include "augplan/esdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "augplan/frame_io.hpp"
#include "byte_io.hpp"

namespace augplan {
namespace {

constexpr std::uint8_t kEsdfVersion = 1;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared-distance transform of one line (lower envelope of parabolas rooted
// at the finite samples). `v` and `z` are scratch of size n and n + 1.
void DistanceTransform1d(const double* f, int n, double* out, int* v,
                         double* z) {
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    const double fq = f[q] + static_cast<double>(q) * q;
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = (fq - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out, out + n, kInf);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    out[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

void EsdfConfig::Validate() const {
  if (!(t >= 0.0)) throw Error(ErrorCode::kValidation, "esdf t must be >= 0");
  if (!(d_cap > 0.0)) {
    throw Error(ErrorCode::kValidation, "esdf d_cap must be positive");
  }
  if (!(unknown_sphere_radius >= 0.0)) {
    throw Error(ErrorCode::kValidation, "unknown_sphere_radius must be >= 0");
  }
  if (!robot_pos.allFinite()) {
    throw Error(ErrorCode::kValidation, "robot position must be finite");
  }
}

EsdfGrid::EsdfGrid(const GridGeometry& geometry, double d_cap,
                   std::vector<double> distances)
    : geometry_(geometry), d_cap_(d_cap), distance_(std::move(distances)) {
  geometry_.Validate();
  if (distance_.size() != geometry_.VoxelCount()) {
    throw Error(ErrorCode::kAlignmentMismatch,
                "distance count does not match the grid");
  }
}

EsdfGrid EsdfGrid::FromObstacles(const GridGeometry& geometry,
                                 std::span<const std::uint8_t> obstacle,
                                 double d_cap) {
  geometry.Validate();
  if (obstacle.size() != geometry.VoxelCount()) {
    throw Error(ErrorCode::kAlignmentMismatch,
                "obstacle mask does not match the grid");
  }
  const int nx = geometry.dims[0];
  const int ny = geometry.dims[1];
  const int nz = geometry.dims[2];
  std::vector<double> d2(obstacle.size());
  for (std::size_t i = 0; i < obstacle.size(); ++i) {
    d2[i] = obstacle[i] ? 0.0 : kInf;
  }
  const int n_max = std::max({nx, ny, nz});
  std::vector<double> line(n_max);
  std::vector<double> result(n_max);
  std::vector<int> v(n_max);
  std::vector<double> z(n_max + 1);

  auto pass = [&](int n, std::size_t stride, auto&& line_starts) {
    line_starts([&](std::size_t base) {
      for (int q = 0; q < n; ++q) line[q] = d2[base + q * stride];
      DistanceTransform1d(line.data(), n, result.data(), v.data(), z.data());
      for (int q = 0; q < n; ++q) d2[base + q * stride] = result[q];
    });
  };
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(nx);
  const std::size_t sz = static_cast<std::size_t>(nx) * ny;
  pass(nx, sx, [&](auto&& f) {
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j) f(k * sz + j * sy);
  });
  pass(ny, sy, [&](auto&& f) {
    for (int k = 0; k < nz; ++k)
      for (int i = 0; i < nx; ++i) f(k * sz + i * sx);
  });
  pass(nz, sz, [&](auto&& f) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) f(j * sy + i * sx);
  });

  std::vector<double> dist(d2.size());
  for (std::size_t i = 0; i < d2.size(); ++i) {
    dist[i] = std::min(std::sqrt(d2[i]) * geometry.voxel_size, d_cap);
  }
  return EsdfGrid(geometry, d_cap, std::move(dist));
}

bool EsdfGrid::InDomain(const Vec3& p) const {
  const Vec3 rel = (p - geometry_.origin) / geometry_.voxel_size;
  for (int a = 0; a < 3; ++a) {
    if (!(rel[a] >= 0.5 && rel[a] <= geometry_.dims[a] - 0.5)) return false;
  }
  return true;
}

double EsdfGrid::Distance(const Vec3& p) const {
  if (!InDomain(p)) {
    throw Error(ErrorCode::kOutOfGrid, "query point outside the ESDF");
  }
  const Vec3 rel = (p - geometry_.origin) / geometry_.voxel_size -
                   Vec3::Constant(0.5);
  int i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    const int last = geometry_.dims[a] - 1;
    i0[a] = std::min(static_cast<int>(std::floor(rel[a])), std::max(last - 1, 0));
    f[a] = last == 0 ? 0.0 : rel[a] - i0[a];
  }
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    double w = 1.0;
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      const int bit = (c >> a) & 1;
      w *= bit ? f[a] : 1.0 - f[a];
      idx[a] = std::min(i0[a] + bit, geometry_.dims[a] - 1);
    }
    if (w == 0.0) continue;
    acc += w * distance_[geometry_.Index(idx[0], idx[1], idx[2])];
  }
  return acc;
}

EsdfGrid::Sample EsdfGrid::Query(const Vec3& p) const {
  const double h = geometry_.voxel_size;
  Sample s;
  s.distance = Distance(p);
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = h;
    s.gradient[a] = (Distance(p + e) - Distance(p - e)) / (2.0 * h);
  }
  return s;
}

std::vector<std::uint8_t> EsdfGrid::Encode() const {
  detail::ByteWriter w(64 + 4 * distance_.size());
  w.Magic("ESDF");
  w.U8(kEsdfVersion);
  for (int a = 0; a < 3; ++a) w.F64(geometry_.origin[a]);
  w.F64(geometry_.voxel_size);
  for (int a = 0; a < 3; ++a) w.U32(static_cast<std::uint32_t>(geometry_.dims[a]));
  w.F64(d_cap_);
  for (double d : distance_) w.F32(static_cast<float>(d));
  return w.Take();
}

EsdfGrid EsdfGrid::Decode(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.ExpectMagic("ESDF");
  if (r.U8() != kEsdfVersion) {
    throw Error(ErrorCode::kMalformedHeader, "unsupported ESDF version");
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
  const double d_cap = r.F64();
  r.Need(4 * g.VoxelCount());
  std::vector<double> dist(g.VoxelCount());
  for (double& d : dist) d = r.F32();
  r.ExpectEnd();
  return EsdfGrid(g, d_cap, std::move(dist));
}

void EsdfGrid::Write(const std::filesystem::path& path) const {
  WriteBytes(path, Encode());
}

EsdfGrid EsdfGrid::Read(const std::filesystem::path& path) {
  return Decode(ReadBytes(path));
}

std::vector<std::uint8_t> ObstacleMask(const TsdfGrid& tsdf,
                                       const EsdfConfig& cfg,
                                       std::span<const Sphere> known_free) {
  cfg.Validate();
  const GridGeometry& g = tsdf.geometry();
  const double unknown_r2 =
      cfg.unknown_sphere_radius * cfg.unknown_sphere_radius;
  std::vector<std::uint8_t> mask(g.VoxelCount(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const VoxelClass c = tsdf.Classify(i, cfg.t);
    if (c == VoxelClass::kOccupied) {
      mask[i] = 1;
    } else if (c == VoxelClass::kUnobserved) {
      const Vec3 center = g.Center(g.Unflatten(i));
      bool cleared = false;
      for (const Sphere& s : known_free) {
        cleared = cleared ||
                  (center - s.center).squaredNorm() <= s.radius * s.radius;
      }
      if (cleared) continue;
      if (cfg.unknown_is_obstacle ||
          (center - cfg.robot_pos).squaredNorm() <= unknown_r2) {
        mask[i] = 1;
      }
    }
  }
  return mask;
}

EsdfGrid ComputeEsdf(const TsdfGrid& tsdf, const EsdfConfig& cfg,
                     std::span<const Sphere> known_free) {
  return EsdfGrid::FromObstacles(tsdf.geometry(),
                                 ObstacleMask(tsdf, cfg, known_free),
                                 cfg.d_cap);
}

bool ClearanceCheck(const EsdfGrid& esdf, std::span<const Vec3> polyline,
                    double radius, double step) {
  if (!(step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "clearance step must be > 0");
  }
  if (polyline.empty()) return true;
  if (esdf.Distance(polyline.front()) < radius) return false;
  for (std::size_t s = 1; s < polyline.size(); ++s) {
    const Vec3& a = polyline[s - 1];
    const Vec3& b = polyline[s];
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int i = 1; i <= n; ++i) {
      const Vec3 p = i == n ? b : a + (b - a) * (static_cast<double>(i) / n);
      if (esdf.Distance(p) < radius) return false;
    }
  }
  return true;
}

}  // namespace augplan
