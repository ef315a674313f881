#include "augplan/plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace augplan {

void PlannerConfig::Validate() const {
  if (!(p_g >= 0.0 && p_g <= 1.0)) {
    throw Error(ErrorCode::kValidation, "planner.p_g must lie in [0, 1]");
  }
  if (!(sample_radius > 0.0)) {
    throw Error(ErrorCode::kValidation, "planner.sample_radius must be > 0");
  }
  if (!(R > 0.0)) throw Error(ErrorCode::kValidation, "planner.R must be > 0");
  if (!(margin >= 0.0)) {
    throw Error(ErrorCode::kValidation, "planner.margin must be >= 0");
  }
  if (!(horizon > 0.0)) {
    throw Error(ErrorCode::kValidation, "planner.horizon must be > 0");
  }
  if (!(v_max > 0.0)) {
    throw Error(ErrorCode::kValidation, "planner.v_max must be > 0");
  }
  if (n_samples < 0) {
    throw Error(ErrorCode::kValidation, "planner.n_samples must be >= 0");
  }
  if (rrt_iteration_budget < 1 || local_iteration_budget < 1) {
    throw Error(ErrorCode::kValidation, "planner budgets must be >= 1");
  }
  if (!(check_step > 0.0)) {
    throw Error(ErrorCode::kValidation, "planner.check_step must be > 0");
  }
}

double PolylineLength(std::span<const Vec3> polyline) {
  double len = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    len += (polyline[i] - polyline[i - 1]).norm();
  }
  return len;
}

Trajectory Trajectory::FromPolyline(std::span<const Vec3> polyline,
                                    double v_max, double t0) {
  Trajectory traj;
  double t = t0;
  for (std::size_t i = 0; i < polyline.size(); ++i) {
    if (i > 0) t += (polyline[i] - polyline[i - 1]).norm() / v_max;
    traj.points.push_back(polyline[i]);
    traj.times.push_back(t);
  }
  return traj;
}

double Trajectory::Length() const { return PolylineLength(points); }

Vec3 Trajectory::PositionAt(double t) const {
  if (points.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty trajectory");
  }
  if (t <= times.front()) return points.front();
  if (t >= times.back()) return points.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const double span = times[i] - times[i - 1];
  if (span <= 0.0) return points[i];
  const double f = (t - times[i - 1]) / span;
  return points[i - 1] + f * (points[i] - points[i - 1]);
}

std::vector<Vec3> Trajectory::RemainingPolyline(double t) const {
  std::vector<Vec3> out;
  if (points.empty()) return out;
  out.push_back(PositionAt(t));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (times[i] > t) out.push_back(points[i]);
  }
  return out;
}

bool Trajectory::IsValid(double v_max) const {
  if (points.size() != times.size()) return false;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    if (dt < 0.0) return false;
    const double len = (points[i] - points[i - 1]).norm();
    if (len > (v_max + 1e-9) * dt + 1e-12) return false;
  }
  return true;
}

bool IsFree(const EsdfGrid& esdf, const Vec3& p, double radius) {
  return esdf.InDomain(p) && esdf.Distance(p) >= radius;
}

bool SegmentFree(const EsdfGrid& esdf, const Vec3& a, const Vec3& b,
                 double radius, double step) {
  // The domain is a box, so both endpoints inside means the segment is.
  if (!esdf.InDomain(a) || !esdf.InDomain(b)) return false;
  const Vec3 seg[2] = {a, b};
  return ClearanceCheck(esdf, seg, radius, step);
}

namespace {

std::vector<Vec3> PruneLineOfSight(const EsdfGrid& esdf,
                                   const std::vector<Vec3>& path,
                                   double radius, double step) {
  if (path.size() <= 2) return path;
  std::vector<Vec3> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && !SegmentFree(esdf, path[i], path[j], radius, step)) {
      --j;
    }
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

}  // namespace

PathResult RrtStar(const EsdfGrid& esdf, const Vec3& start, const Vec3& goal,
                   const RrtOptions& options) {
  PathResult result;
  if (!IsFree(esdf, start, options.radius)) {
    result.status = PlanStatus::kInvalidStart;
    return result;
  }
  const GridGeometry& g = esdf.geometry();
  const Vec3 lo = g.origin + Vec3::Constant(0.5 * g.voxel_size);
  const Vec3 hi = g.origin + g.Extent() - Vec3::Constant(0.5 * g.voxel_size);
  const Vec3 size = (hi - lo).cwiseMax(0.0);
  const double volume = size.x() * size.y() * size.z();
  const double unit_ball = 4.0 / 3.0 * std::numbers::pi;
  const double gamma =
      2.0 * std::cbrt(4.0 / 3.0) * std::cbrt(volume / unit_ball);
  const bool goal_free = IsFree(esdf, goal, options.radius);

  std::vector<Vec3> pos{start};
  std::vector<int> parent{-1};
  std::vector<double> cost{0.0};
  std::vector<std::vector<int>> children(1);
  int goal_node = -1;

  auto edge_free = [&](const Vec3& a, const Vec3& b) {
    return SegmentFree(esdf, a, b, options.radius, options.check_step);
  };

  Rng rng(options.seed);
  std::vector<std::pair<double, int>> near;
  std::vector<int> stack;
  int it = 0;
  for (; it < options.iteration_budget; ++it) {
    Vec3 sample;
    if (goal_free && rng.Uniform() < options.goal_bias) {
      sample = goal;
    } else {
      for (int a = 0; a < 3; ++a) sample[a] = rng.Uniform(lo[a], hi[a]);
    }
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < pos.size(); ++n) {
      const double d2 = (pos[n] - sample).squaredNorm();
      if (d2 < best) {
        best = d2;
        nearest = static_cast<int>(n);
      }
    }
    const double dist = std::sqrt(best);
    if (dist == 0.0) continue;
    const Vec3 fresh =
        dist > options.max_extension
            ? Vec3(pos[nearest] + (sample - pos[nearest]) *
                                      (options.max_extension / dist))
            : sample;
    if (!IsFree(esdf, fresh, options.radius)) continue;

    const double n_nodes = static_cast<double>(pos.size() + 1);
    const double r_near =
        std::min(gamma * std::cbrt(std::log(n_nodes) / n_nodes),
                 options.max_extension);
    near.clear();
    for (std::size_t n = 0; n < pos.size(); ++n) {
      const double d = (pos[n] - fresh).norm();
      if (d <= r_near || static_cast<int>(n) == nearest) {
        near.emplace_back(d, static_cast<int>(n));
      }
    }
    std::vector<std::pair<double, int>> by_cost;
    by_cost.reserve(near.size());
    for (const auto& [d, n] : near) by_cost.emplace_back(cost[n] + d, n);
    std::sort(by_cost.begin(), by_cost.end());
    int chosen = -1;
    double chosen_cost = 0.0;
    for (const auto& [c, n] : by_cost) {
      if (edge_free(pos[n], fresh)) {
        chosen = n;
        chosen_cost = c;
        break;
      }
    }
    if (chosen < 0) continue;

    const int id = static_cast<int>(pos.size());
    pos.push_back(fresh);
    parent.push_back(chosen);
    cost.push_back(chosen_cost);
    children.emplace_back();
    children[chosen].push_back(id);
    if (fresh == goal) goal_node = id;

    for (const auto& [d, n] : near) {
      if (n == chosen) continue;
      const double candidate = chosen_cost + d;
      if (candidate + 1e-12 >= cost[n] || !edge_free(fresh, pos[n])) continue;
      auto& siblings = children[parent[n]];
      siblings.erase(std::find(siblings.begin(), siblings.end(), n));
      parent[n] = id;
      children[id].push_back(n);
      const double delta = candidate - cost[n];
      stack.assign(1, n);
      while (!stack.empty()) {
        const int q = stack.back();
        stack.pop_back();
        cost[q] += delta;
        for (int c : children[q]) stack.push_back(c);
      }
    }
  }
  result.iterations = it;
  result.tree_size = pos.size();
  if (goal_node < 0) {
    result.status = PlanStatus::kNoPathFound;
    return result;
  }
  std::vector<Vec3> path;
  for (int n = goal_node; n >= 0; n = parent[n]) path.push_back(pos[n]);
  std::reverse(path.begin(), path.end());
  result.path =
      PruneLineOfSight(esdf, path, options.radius, options.check_step);
  result.status = PlanStatus::kOk;
  return result;
}

std::vector<Vec3> Shortcut(const EsdfGrid& esdf, std::vector<Vec3> path,
                           double radius, double step, int attempts,
                           std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> arc;
  for (int attempt = 0; attempt < attempts && path.size() > 2; ++attempt) {
    arc.assign(1, 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) {
      arc.push_back(arc.back() + (path[i] - path[i - 1]).norm());
    }
    double s1 = rng.Uniform(0.0, arc.back());
    double s2 = rng.Uniform(0.0, arc.back());
    if (s1 > s2) std::swap(s1, s2);
    // Segment index containing arc position s.
    auto locate = [&](double s) {
      const auto it = std::upper_bound(arc.begin(), arc.end(), s);
      return std::min<std::size_t>(
          static_cast<std::size_t>(std::max<std::ptrdiff_t>(
              it - arc.begin() - 1, 0)),
          path.size() - 2);
    };
    const std::size_t i1 = locate(s1);
    const std::size_t i2 = locate(s2);
    if (i1 == i2) continue;
    auto point_at = [&](std::size_t i, double s) {
      const double seg = arc[i + 1] - arc[i];
      const double f = seg > 0.0 ? (s - arc[i]) / seg : 0.0;
      return Vec3(path[i] + f * (path[i + 1] - path[i]));
    };
    const Vec3 p1 = point_at(i1, s1);
    const Vec3 p2 = point_at(i2, s2);
    if (!SegmentFree(esdf, p1, p2, radius, step)) continue;
    std::vector<Vec3> next(path.begin(), path.begin() + i1 + 1);
    if (p1 != next.back()) next.push_back(p1);
    if (p2 != next.back()) next.push_back(p2);
    for (std::size_t i = i2 + 1; i < path.size(); ++i) {
      if (path[i] != next.back()) next.push_back(path[i]);
    }
    path = std::move(next);
  }
  return path;
}

std::optional<Vec3> ProjectToHorizon(const EsdfGrid& esdf, const Vec3& current,
                                     const Vec3& goal, double horizon,
                                     double R) {
  const Vec3 to_goal = goal - current;
  const double dist = to_goal.norm();
  if (dist <= horizon) return goal;
  const Vec3 axis = to_goal / dist;
  // Orthonormal frame around the goal direction.
  const Vec3 helper =
      std::abs(axis.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = axis.cross(helper).normalized();
  const Vec3 e2 = axis.cross(e1);
  constexpr int kProbes = 64;
  const double cos_max = std::cos(std::numbers::pi / 3.0);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < kProbes; ++k) {
    const double cos_t =
        1.0 - (1.0 - cos_max) * static_cast<double>(k) / (kProbes - 1);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = golden * k;
    const Vec3 dir = cos_t * axis +
                     sin_t * (std::cos(phi) * e1 + std::sin(phi) * e2);
    const Vec3 probe = current + horizon * dir;
    if (IsFree(esdf, probe, R)) return probe;
  }
  return std::nullopt;
}

double UnobservedFraction(const TsdfGrid& tsdf, const Vec3& x, double radius) {
  const GridGeometry& g = tsdf.geometry();
  const double v = g.voxel_size;
  const double r2 = radius * radius;
  Index3 lo;
  Index3 hi;
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor(
                            (x[a] - radius - g.origin[a]) / v - 0.5)));
    hi[a] = std::min(g.dims[a] - 1, static_cast<int>(std::ceil(
                                        (x[a] + radius - g.origin[a]) / v -
                                        0.5)));
  }
  std::size_t total = 0;
  std::size_t unobserved = 0;
  for (int k = lo.z(); k <= hi.z(); ++k) {
    for (int j = lo.y(); j <= hi.y(); ++j) {
      for (int i = lo.x(); i <= hi.x(); ++i) {
        if ((g.Center(i, j, k) - x).squaredNorm() > r2) continue;
        ++total;
        if (tsdf.weight(g.Index(i, j, k)) == 0.0) ++unobserved;
      }
    }
  }
  return total == 0 ? 0.0
                    : static_cast<double>(unobserved) /
                          static_cast<double>(total);
}

double Reward(const EsdfGrid& esdf, const TsdfGrid& tsdf, const Vec3& current,
              const Vec3& goal, const Vec3& x, const RewardWeights& weights) {
  return weights.w_goal * ((current - goal).norm() - (x - goal).norm()) +
         weights.w_unk * UnobservedFraction(tsdf, x, 1.0) +
         weights.w_clear * std::min(esdf.Distance(x), 1.0);
}

IntermediateGoal SelectIntermediateGoal(const EsdfGrid& esdf,
                                        const TsdfGrid& tsdf,
                                        const Vec3& current,
                                        const Vec3& global_goal,
                                        const PlannerConfig& cfg, Rng& rng) {
  if (!(esdf.geometry() == tsdf.geometry())) {
    throw Error(ErrorCode::kAlignmentMismatch, "ESDF and TSDF differ");
  }
  IntermediateGoal out;
  if (rng.Uniform() < cfg.p_g) {
    if (auto projected = ProjectToHorizon(esdf, current, global_goal,
                                          cfg.horizon, cfg.ClearanceRadius())) {
      out.choice = GoalChoice::kGlobal;
      out.point = *projected;
      return out;
    }
  }
  const GridGeometry& g = tsdf.geometry();
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < cfg.n_samples; ++s) {
    const Vec3 x = rng.InBall(current, cfg.sample_radius);
    if (!IsFree(esdf, x, cfg.ClearanceRadius())) continue;
    const auto voxel = g.VoxelOf(x);
    if (!voxel || tsdf.weight(g.Index(*voxel)) == 0.0) continue;
    const double r =
        Reward(esdf, tsdf, current, global_goal, x, cfg.weights);
    if (r > best) {
      best = r;
      out.choice = GoalChoice::kSampled;
      out.point = x;
      out.reward = r;
    }
  }
  if (out.choice == GoalChoice::kStay) out.point = current;
  return out;
}

std::optional<std::vector<Vec3>> EscapeMargin(const EsdfGrid& esdf,
                                              const Vec3& start,
                                              const PlannerConfig& cfg) {
  std::vector<Vec3> path{start};
  if (!IsFree(esdf, start, cfg.R)) return std::nullopt;
  const double step = cfg.check_step;
  const int max_steps =
      static_cast<int>(std::ceil(2.0 * cfg.margin / step)) + 1;
  Vec3 p = start;
  double d = esdf.Distance(p);
  for (int s = 0; s < max_steps && d < cfg.ClearanceRadius(); ++s) {
    const Vec3 e = Vec3::Constant(esdf.geometry().voxel_size);
    if (!esdf.InDomain(p - e) || !esdf.InDomain(p + e)) return std::nullopt;
    const Vec3 grad = esdf.Query(p).gradient;
    if (!(grad.norm() > 1e-9)) return std::nullopt;
    const Vec3 next = p + grad.normalized() * step;
    if (!esdf.InDomain(next)) return std::nullopt;
    const double d_next = esdf.Distance(next);
    if (!(d_next > d)) return std::nullopt;
    p = next;
    d = d_next;
    path.push_back(p);
  }
  if (d < cfg.ClearanceRadius()) return std::nullopt;
  return path;
}

LocalPlanResult LocalPlan(const EsdfGrid& esdf, const Vec3& start,
                          const Vec3& intermediate, const PlannerConfig& cfg,
                          std::uint64_t seed, double t0) {
  LocalPlanResult out;
  const double radius = cfg.ClearanceRadius();
  const auto escape = EscapeMargin(esdf, start, cfg);
  if (!escape) {
    out.status = PlanStatus::kInvalidStart;
    return out;
  }
  if (!IsFree(esdf, intermediate, radius)) return out;
  const Vec3 from = escape->back();
  std::vector<Vec3> path;
  if (SegmentFree(esdf, from, intermediate, radius, cfg.check_step)) {
    path = {from, intermediate};
  } else {
    RrtOptions rrt;
    rrt.radius = radius;
    rrt.iteration_budget = cfg.local_iteration_budget;
    rrt.seed = seed;
    rrt.check_step = cfg.check_step;
    PathResult found = RrtStar(esdf, from, intermediate, rrt);
    if (found.status != PlanStatus::kOk) return out;
    path = Shortcut(esdf, std::move(found.path), radius, cfg.check_step, 100,
                    DeriveSeed(seed, 1));
  }
  if (!ClearanceCheck(esdf, path, radius, cfg.check_step)) return out;
  path.insert(path.begin(), escape->begin(), escape->end() - 1);
  if (!ClearanceCheck(esdf, path, cfg.R, cfg.check_step)) return out;
  out.trajectory = Trajectory::FromPolyline(path, cfg.v_max, t0);
  out.status = PlanStatus::kOk;
  return out;
}

}  // namespace augplan
