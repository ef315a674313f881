#include "augplan/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

namespace augplan {
namespace {

constexpr double kMinT = 1e-9;

bool InUnit(double v) { return v >= 0.0 && v <= 1.0; }

void ConsiderHit(std::optional<RayHit>& best, double t, const Vec3& normal,
                 double albedo) {
  if (t > kMinT && (!best || t < best->t)) {
    best = RayHit{t, normal, albedo};
  }
}

void IntersectCylinder(const Cylinder& c, const Vec3& o, const Vec3& d,
                       std::optional<RayHit>& best) {
  const double ox = o.x() - c.center.x();
  const double oy = o.y() - c.center.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  const double r2 = c.radius * c.radius;
  if (a > 0.0) {
    const double b = 2.0 * (d.x() * ox + d.y() * oy);
    const double cc = ox * ox + oy * oy - r2;
    const double disc = b * b - 4.0 * a * cc;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      const double q = -0.5 * (b + std::copysign(root, b));
      double roots[2] = {q / a, q != 0.0 ? cc / q : q / a};
      for (const double t : roots) {
        const double z = o.z() + t * d.z();
        if (z < c.z_min || z > c.z_max()) continue;
        const Vec3 n(ox + t * d.x(), oy + t * d.y(), 0.0);
        ConsiderHit(best, t, n / c.radius, c.albedo);
      }
    }
  }
  if (d.z() != 0.0) {
    for (const double zc : {c.z_min, c.z_max()}) {
      const double t = (zc - o.z()) / d.z();
      const double x = ox + t * d.x();
      const double y = oy + t * d.y();
      if (x * x + y * y <= r2) {
        ConsiderHit(best, t, Vec3(0.0, 0.0, zc == c.z_min ? -1.0 : 1.0),
                    c.albedo);
      }
    }
  }
}

// Slab test. From outside returns the entry face, from inside the exit face.
void IntersectBox(const Aabb& box, const Vec3& o, const Vec3& d, double albedo,
                  std::optional<RayHit>& best) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int near_axis = -1;
  int far_axis = -1;
  double near_sign = 0.0;
  double far_sign = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < box.min[axis] || o[axis] > box.max[axis]) return;
      continue;
    }
    double t0 = (box.min[axis] - o[axis]) / d[axis];
    double t1 = (box.max[axis] - o[axis]) / d[axis];
    double s0 = -1.0;
    double s1 = 1.0;
    if (t0 > t1) {
      std::swap(t0, t1);
      std::swap(s0, s1);
    }
    if (t0 > t_near) {
      t_near = t0;
      near_axis = axis;
      near_sign = s0;
    }
    if (t1 < t_far) {
      t_far = t1;
      far_axis = axis;
      far_sign = s1;
    }
  }
  if (t_near > t_far) return;
  if (t_near > kMinT && near_axis >= 0) {
    Vec3 n = Vec3::Zero();
    n[near_axis] = near_sign;
    ConsiderHit(best, t_near, n, albedo);
  } else if (t_far > kMinT && far_axis >= 0) {
    Vec3 n = Vec3::Zero();
    n[far_axis] = -far_sign;
    ConsiderHit(best, t_far, n, albedo);
  }
}

// The shell is seen from inside: the hit is where the ray leaves the bounds.
void IntersectShell(const Scene& scene, const Vec3& o, const Vec3& d,
                    std::optional<RayHit>& best, bool& escaped) {
  const Aabb& b = scene.bounds;
  double t_exit = std::numeric_limits<double>::infinity();
  int axis_exit = -1;
  bool positive = false;
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] > 0.0) {
      const double t = (b.max[axis] - o[axis]) / d[axis];
      if (t < t_exit) {
        t_exit = t;
        axis_exit = axis;
        positive = true;
      }
    } else if (d[axis] < 0.0) {
      const double t = (b.min[axis] - o[axis]) / d[axis];
      if (t < t_exit) {
        t_exit = t;
        axis_exit = axis;
        positive = false;
      }
    }
  }
  if (axis_exit < 0 || !(t_exit > kMinT)) return;
  if (best && best->t <= t_exit) return;
  double albedo = scene.shell.wall_albedo;
  if (axis_exit == 2) {
    if (positive && scene.shell.open_ceiling) {
      escaped = true;
      return;
    }
    albedo = positive ? scene.shell.ceiling_albedo : scene.shell.floor_albedo;
  }
  Vec3 n = Vec3::Zero();
  n[axis_exit] = positive ? -1.0 : 1.0;
  ConsiderHit(best, t_exit, n, albedo);
}

double CylinderSurfaceDistance(const Cylinder& c, const Vec3& p) {
  const double rho = std::hypot(p.x() - c.center.x(), p.y() - c.center.y());
  const double dr = rho - c.radius;
  const double dz = std::max(c.z_min - p.z(), p.z() - c.z_max());
  if (dr <= 0.0 && dz <= 0.0) return std::min(-dr, -dz);
  return std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
}

double BoxSurfaceDistance(const Aabb& box, const Vec3& p) {
  const Vec3 below = box.min - p;
  const Vec3 above = p - box.max;
  const Vec3 outside = below.cwiseMax(above);
  if ((outside.array() <= 0.0).all()) return -outside.maxCoeff();
  return outside.cwiseMax(0.0).norm();
}

double ShellSurfaceDistance(const Scene& scene, const Vec3& p) {
  const Aabb& b = scene.bounds;
  if (!b.Contains(p)) return BoxSurfaceDistance(b, p);
  double d = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    d = std::min(d, p[axis] - b.min[axis]);
    if (axis == 2 && scene.shell.open_ceiling) continue;
    d = std::min(d, b.max[axis] - p[axis]);
  }
  return d;
}

}  // namespace

void Scene::Validate() const {
  if (!((bounds.Size().array() > 0.0).all())) {
    throw Error(ErrorCode::kInvalidArgument, "scene bounds must have volume");
  }
  if (!InUnit(shell.wall_albedo) || !InUnit(shell.floor_albedo) ||
      !InUnit(shell.ceiling_albedo)) {
    throw Error(ErrorCode::kInvalidArgument, "shell albedo outside [0, 1]");
  }
  for (const Cylinder& c : cylinders) {
    if (!(c.radius > 0.0) || !(c.height > 0.0) || !InUnit(c.albedo)) {
      throw Error(ErrorCode::kInvalidArgument, "degenerate cylinder");
    }
    if (c.z_min >= bounds.max.z() || c.z_max() <= bounds.min.z()) {
      throw Error(ErrorCode::kInvalidArgument, "cylinder outside bounds");
    }
  }
  for (const Box& box : boxes) {
    if (!((box.extent.Size().array() > 0.0).all()) || !InUnit(box.albedo)) {
      throw Error(ErrorCode::kInvalidArgument, "degenerate box");
    }
    const Vec3 lo = box.extent.min.cwiseMax(bounds.min);
    const Vec3 hi = box.extent.max.cwiseMin(bounds.max);
    if (!((hi - lo).array() > 0.0).all()) {
      throw Error(ErrorCode::kInvalidArgument, "box outside bounds");
    }
  }
}

void LightModel::Validate() const {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "light direction must be unit");
  }
  if (!InUnit(ambient)) {
    throw Error(ErrorCode::kInvalidArgument, "ambient outside [0, 1]");
  }
}

std::optional<RayHit> CastRay(const Scene& scene, const Vec3& origin,
                              const Vec3& direction) {
  std::optional<RayHit> best;
  for (const Cylinder& c : scene.cylinders) {
    IntersectCylinder(c, origin, direction, best);
  }
  for (const Box& box : scene.boxes) {
    IntersectBox(box.extent, origin, direction, box.albedo, best);
  }
  bool escaped = false;
  IntersectShell(scene, origin, direction, best, escaped);
  if (best && best->normal.dot(direction) > 0.0) best->normal = -best->normal;
  return best;
}

RenderedFrame Render(const Scene& scene, const Pose& pose,
                     const Intrinsics& intr, const LightModel& light) {
  intr.Validate();
  const Eigen::Matrix3d rotation = pose.rotation.toRotationMatrix();
  RenderedFrame out{DepthFrame(intr.width, intr.height),
                    GrayFrame(intr.width, intr.height)};
  const Vec3 to_light = -light.direction;
  for (int row = 0; row < intr.height; ++row) {
    for (int col = 0; col < intr.width; ++col) {
      const Vec3 dir = rotation * PixelRay(intr, row, col);
      const auto hit = CastRay(scene, pose.translation, dir);
      if (!hit) continue;
      out.depth(row, col) = hit->t;
      const double lambert = std::max(0.0, hit->normal.dot(to_light));
      out.gray(row, col) = std::clamp(
          light.ambient + (1.0 - light.ambient) * hit->albedo * lambert, 0.0,
          1.0);
    }
  }
  return out;
}

DepthFrame RenderDepth(const Scene& scene, const Pose& pose,
                       const Intrinsics& intr) {
  return Render(scene, pose, intr).depth;
}

GrayFrame RenderGray(const Scene& scene, const Pose& pose,
                     const Intrinsics& intr, const LightModel& light) {
  return Render(scene, pose, intr, light).gray;
}

bool Occupied(const Scene& scene, const Vec3& p) {
  if (!scene.bounds.Contains(p)) return true;
  for (const Cylinder& c : scene.cylinders) {
    if (p.z() < c.z_min || p.z() > c.z_max()) continue;
    const double dx = p.x() - c.center.x();
    const double dy = p.y() - c.center.y();
    if (dx * dx + dy * dy <= c.radius * c.radius) return true;
  }
  for (const Box& box : scene.boxes) {
    if (box.extent.Contains(p)) return true;
  }
  return false;
}

double DistanceToSurface(const Scene& scene, const Vec3& p) {
  double d = ShellSurfaceDistance(scene, p);
  for (const Cylinder& c : scene.cylinders) {
    d = std::min(d, CylinderSurfaceDistance(c, p));
  }
  for (const Box& box : scene.boxes) {
    d = std::min(d, BoxSurfaceDistance(box.extent, p));
  }
  return d;
}

namespace {

// Obstacle footprint in the xy plane: a disk or an axis-aligned rectangle.
struct Footprint {
  bool disk = true;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  Vec2 half = Vec2::Zero();
};

double FootprintGap(const Footprint& a, const Footprint& b) {
  if (a.disk && b.disk) {
    return (a.center - b.center).norm() - a.radius - b.radius;
  }
  if (!a.disk && !b.disk) {
    const Vec2 sep =
        ((a.center - b.center).cwiseAbs() - a.half - b.half).cwiseMax(0.0);
    return sep.norm();
  }
  const Footprint& disk = a.disk ? a : b;
  const Footprint& rect = a.disk ? b : a;
  const Vec2 sep =
      ((disk.center - rect.center).cwiseAbs() - rect.half).cwiseMax(0.0);
  return sep.norm() - disk.radius;
}

bool FitsAmong(const Footprint& f, const std::vector<Footprint>& placed,
               double gap) {
  return std::all_of(placed.begin(), placed.end(), [&](const Footprint& o) {
    return FootprintGap(f, o) >= gap;
  });
}

[[noreturn]] void PlacementFailure(const std::string& what) {
  throw Error(ErrorCode::kPlacementFailure,
              "rejection sampling exhausted its attempt budget placing " +
                  what);
}

Box RandomBox(Rng& rng, const Vec2& lo, const Vec2& hi, double z0,
              double size_min, double size_max, double h_min, double h_max,
              double gap, Footprint& footprint) {
  const double sx = rng.Uniform(size_min, size_max);
  const double sy = rng.Uniform(size_min, size_max);
  const double h = rng.Uniform(h_min, h_max);
  const double cx = rng.Uniform(lo.x() + gap + 0.5 * sx, hi.x() - gap - 0.5 * sx);
  const double cy = rng.Uniform(lo.y() + gap + 0.5 * sy, hi.y() - gap - 0.5 * sy);
  footprint = Footprint{false, Vec2(cx, cy), 0.0, Vec2(0.5 * sx, 0.5 * sy)};
  Box box;
  box.extent.min = Vec3(cx - 0.5 * sx, cy - 0.5 * sy, z0);
  box.extent.max = Vec3(cx + 0.5 * sx, cy + 0.5 * sy, z0 + h);
  box.albedo = rng.Uniform(0.2, 0.9);
  return box;
}

WaypointSet PlaceWaypoints(const Scene& scene, Rng& rng, int count,
                           double clearance, double height,
                           double min_separation, int max_attempts) {
  WaypointSet set;
  set.clearance = clearance;
  const Aabb& b = scene.bounds;
  int attempts = 0;
  while (static_cast<int>(set.points.size()) < count) {
    if (++attempts > max_attempts) PlacementFailure("waypoints");
    const Vec3 p(rng.Uniform(b.min.x(), b.max.x()),
                 rng.Uniform(b.min.y(), b.max.y()), height);
    if (Occupied(scene, p) || DistanceToSurface(scene, p) < clearance) continue;
    const bool spread =
        std::all_of(set.points.begin(), set.points.end(), [&](const Vec3& q) {
          return (q - p).norm() >= min_separation;
        });
    if (spread) set.points.push_back(p);
  }
  return set;
}

}  // namespace

std::pair<Scene, WaypointSet> GenerateCylinderForest(
    std::uint64_t seed, const ForestOptions& opt) {
  if (!((opt.bounds.Size().array() > 0.0).all())) {
    throw Error(ErrorCode::kInvalidArgument, "bounds volume must be positive");
  }
  if (!(opt.clearance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "clearance must be positive");
  }
  if (opt.radius_min <= 0.0 || opt.radius_max < opt.radius_min) {
    throw Error(ErrorCode::kInvalidArgument, "bad cylinder radius range");
  }
  Rng rng(DeriveSeed(seed, 0x666f72657374ULL));
  Scene scene;
  scene.bounds = opt.bounds;
  const Vec2 lo = opt.bounds.min.head<2>();
  const Vec2 hi = opt.bounds.max.head<2>();
  std::vector<Footprint> placed;

  int attempts = 0;
  while (static_cast<int>(scene.cylinders.size()) < opt.n_cylinders) {
    if (++attempts > opt.max_attempts) PlacementFailure("cylinders");
    Cylinder c;
    c.radius = rng.Uniform(opt.radius_min, opt.radius_max);
    const double margin = opt.obstacle_gap + c.radius;
    c.center = Vec2(rng.Uniform(lo.x() + margin, hi.x() - margin),
                    rng.Uniform(lo.y() + margin, hi.y() - margin));
    c.z_min = opt.bounds.min.z();
    c.height = std::min(opt.cylinder_height, opt.bounds.Size().z());
    c.albedo = rng.Uniform(0.2, 0.9);
    const Footprint f{true, c.center, c.radius, Vec2::Zero()};
    if (!FitsAmong(f, placed, opt.obstacle_gap)) continue;
    placed.push_back(f);
    scene.cylinders.push_back(c);
  }

  attempts = 0;
  while (static_cast<int>(scene.boxes.size()) < opt.n_boxes) {
    if (++attempts > opt.max_attempts) PlacementFailure("boxes");
    Footprint f;
    Box box = RandomBox(rng, lo, hi, opt.bounds.min.z(), opt.box_size_min,
                        opt.box_size_max, opt.box_height_min,
                        std::min(opt.box_height_max, opt.bounds.Size().z()),
                        opt.obstacle_gap, f);
    if (!FitsAmong(f, placed, opt.obstacle_gap)) continue;
    placed.push_back(f);
    scene.boxes.push_back(box);
  }
  scene.Validate();

  WaypointSet waypoints = PlaceWaypoints(
      scene, rng, opt.waypoint_count, opt.clearance,
      opt.bounds.min.z() + opt.waypoint_height, opt.min_waypoint_separation,
      opt.max_attempts);
  return {std::move(scene), std::move(waypoints)};
}

std::pair<Scene, WaypointSet> GenerateFourRooms(
    std::uint64_t seed, const FourRoomsOptions& opt) {
  if (!((opt.bounds.Size().array() > 0.0).all())) {
    throw Error(ErrorCode::kInvalidArgument, "bounds volume must be positive");
  }
  Rng rng(DeriveSeed(seed, 0x726f6f6d73ULL));
  Scene scene;
  scene.bounds = opt.bounds;
  const Aabb& b = opt.bounds;
  const double half_t = 0.5 * opt.wall_thickness;
  const Vec2 mid = 0.5 * (b.min + b.max).head<2>();
  const double z0 = b.min.z();
  const double z1 = b.max.z();

  // Each wall arm runs from the bounds to the crossing and has one door.
  auto add_arm = [&](int axis, double from, double to) {
    const double lo = std::min(from, to);
    const double hi = std::max(from, to);
    const double keep = 0.5 * opt.door_width + 1.0;
    const double door = rng.Uniform(lo + keep, hi - keep);
    const double albedo = rng.Uniform(0.55, 0.75);
    const double other = axis == 0 ? mid.y() : mid.x();
    for (const auto& [s0, s1] :
         {std::pair{lo, door - 0.5 * opt.door_width},
          std::pair{door + 0.5 * opt.door_width, hi}}) {
      Box wall;
      wall.albedo = albedo;
      if (axis == 0) {
        wall.extent.min = Vec3(s0, other - half_t, z0);
        wall.extent.max = Vec3(s1, other + half_t, z1);
      } else {
        wall.extent.min = Vec3(other - half_t, s0, z0);
        wall.extent.max = Vec3(other + half_t, s1, z1);
      }
      scene.boxes.push_back(wall);
    }
  };
  add_arm(0, b.min.x(), mid.x());
  add_arm(0, mid.x(), b.max.x());
  add_arm(1, b.min.y(), mid.y());
  add_arm(1, mid.y(), b.max.y());

  const std::array<std::pair<Vec2, Vec2>, 4> rooms = {{
      {b.min.head<2>(), Vec2(mid.x() - half_t, mid.y() - half_t)},
      {Vec2(mid.x() + half_t, b.min.y()), Vec2(b.max.x(), mid.y() - half_t)},
      {Vec2(b.min.x(), mid.y() + half_t), Vec2(mid.x() - half_t, b.max.y())},
      {Vec2(mid.x() + half_t, mid.y() + half_t), b.max.head<2>()},
  }};
  for (const auto& [lo, hi] : rooms) {
    std::vector<Footprint> placed;
    int placed_here = 0;
    int attempts = 0;
    while (placed_here < opt.boxes_per_room) {
      if (++attempts > opt.max_attempts) PlacementFailure("furniture");
      Footprint f;
      Box box = RandomBox(rng, lo, hi, z0, opt.box_size_min, opt.box_size_max,
                          opt.box_height_min, opt.box_height_max,
                          opt.obstacle_gap, f);
      if (!FitsAmong(f, placed, opt.obstacle_gap)) continue;
      placed.push_back(f);
      scene.boxes.push_back(box);
      ++placed_here;
    }
  }
  scene.Validate();

  WaypointSet waypoints = PlaceWaypoints(
      scene, rng, opt.waypoint_count, opt.clearance, z0 + opt.waypoint_height,
      opt.min_waypoint_separation, opt.max_attempts);
  return {std::move(scene), std::move(waypoints)};
}

std::vector<Pose> SurveyPoses(const Scene& scene, int n_poses, double height,
                              double inset, double min_clearance) {
  const Aabb& b = scene.bounds;
  const Vec2 lo = b.min.head<2>() + Vec2::Constant(inset);
  const Vec2 hi = b.max.head<2>() - Vec2::Constant(inset);
  const std::array<Vec2, 5> corners = {lo, Vec2(hi.x(), lo.y()), hi,
                                       Vec2(lo.x(), hi.y()), lo};
  double perimeter = 0.0;
  for (int k = 0; k < 4; ++k) perimeter += (corners[k + 1] - corners[k]).norm();
  const Vec2 center = 0.5 * (lo + hi);

  std::vector<Pose> poses;
  for (int n = 0; n < n_poses; ++n) {
    double s = perimeter * n / n_poses;
    int k = 0;
    while (k < 3 && s > (corners[k + 1] - corners[k]).norm()) {
      s -= (corners[k + 1] - corners[k]).norm();
      ++k;
    }
    const Vec2 along = (corners[k + 1] - corners[k]).normalized();
    const Vec2 xy = corners[k] + s * along;
    const Vec2 look = n % 2 == 0 ? along : (center - xy).normalized();
    const Vec3 position(xy.x(), xy.y(), b.min.z() + height);
    if (Occupied(scene, position) ||
        DistanceToSurface(scene, position) < min_clearance) {
      continue;
    }
    poses.push_back(Pose::LookingAlong(position, std::atan2(look.y(), look.x())));
  }
  return poses;
}

namespace {

using nlohmann::json;

json VecJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 JsonVec(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kValidation, "expected a 3-vector");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

json SceneToJson(const Scene& scene, const WaypointSet& waypoints) {
  json doc;
  doc["bounds"] = {{"min", VecJson(scene.bounds.min)},
                   {"max", VecJson(scene.bounds.max)}};
  doc["shell"] = {{"wall_albedo", scene.shell.wall_albedo},
                  {"floor_albedo", scene.shell.floor_albedo},
                  {"ceiling_albedo", scene.shell.ceiling_albedo},
                  {"open_ceiling", scene.shell.open_ceiling}};
  doc["cylinders"] = json::array();
  for (const Cylinder& c : scene.cylinders) {
    doc["cylinders"].push_back({{"center", {c.center.x(), c.center.y()}},
                                {"radius", c.radius},
                                {"z_min", c.z_min},
                                {"height", c.height},
                                {"albedo", c.albedo}});
  }
  doc["boxes"] = json::array();
  for (const Box& box : scene.boxes) {
    doc["boxes"].push_back({{"min", VecJson(box.extent.min)},
                            {"max", VecJson(box.extent.max)},
                            {"albedo", box.albedo}});
  }
  json points = json::array();
  for (const Vec3& p : waypoints.points) points.push_back(VecJson(p));
  doc["waypoints"] = {{"points", points}, {"clearance", waypoints.clearance}};
  return doc;
}

std::pair<Scene, WaypointSet> SceneFromJson(const json& doc) {
  try {
    Scene scene;
    scene.bounds.min = JsonVec(doc.at("bounds").at("min"));
    scene.bounds.max = JsonVec(doc.at("bounds").at("max"));
    if (doc.contains("shell")) {
      const json& s = doc.at("shell");
      scene.shell.wall_albedo = s.at("wall_albedo").get<double>();
      scene.shell.floor_albedo = s.at("floor_albedo").get<double>();
      scene.shell.ceiling_albedo = s.at("ceiling_albedo").get<double>();
      scene.shell.open_ceiling = s.value("open_ceiling", false);
    }
    for (const json& c : doc.value("cylinders", json::array())) {
      Cylinder cyl;
      cyl.center = Vec2(c.at("center").at(0).get<double>(),
                        c.at("center").at(1).get<double>());
      cyl.radius = c.at("radius").get<double>();
      cyl.z_min = c.value("z_min", 0.0);
      cyl.height = c.at("height").get<double>();
      cyl.albedo = c.at("albedo").get<double>();
      scene.cylinders.push_back(cyl);
    }
    for (const json& b : doc.value("boxes", json::array())) {
      Box box;
      box.extent.min = JsonVec(b.at("min"));
      box.extent.max = JsonVec(b.at("max"));
      box.albedo = b.at("albedo").get<double>();
      scene.boxes.push_back(box);
    }
    scene.Validate();
    WaypointSet waypoints;
    if (doc.contains("waypoints")) {
      for (const json& p : doc.at("waypoints").at("points")) {
        waypoints.points.push_back(JsonVec(p));
      }
      waypoints.clearance = doc.at("waypoints").value("clearance", 0.0);
    }
    return {std::move(scene), std::move(waypoints)};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation,
                std::string("malformed scene document: ") + e.what());
  }
}

}  // namespace augplan
