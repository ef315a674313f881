#include "augplan/tsdf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

namespace augplan {
namespace {

// 0.1 m voxels, x in [0, 2), y and z in [-0.5, 0.5).
TsdfGrid AxisGrid() {
  GridGeometry g;
  g.origin = Vec3(0.0, -0.5, -0.5);
  g.voxel_size = 0.1;
  g.dims = {20, 10, 10};
  return TsdfGrid(g, 0.4);
}

std::size_t VoxelAt(const TsdfGrid& grid, const Vec3& p) {
  return grid.geometry().Index(*grid.geometry().VoxelOf(p));
}

TEST(GeometryTest, CoveringAndIndexing) {
  const GridGeometry g = GridGeometry::Covering({Vec3(0, 0, 0), Vec3(15, 12, 4)}, 0.1);
  EXPECT_EQ(g.dims, (std::array<int, 3>{150, 120, 40}));
  for (std::size_t i : {0ul, 17ul, 123456ul, g.VoxelCount() - 1}) {
    EXPECT_EQ(g.Index(g.Unflatten(i)), i);
  }
  EXPECT_FALSE(g.VoxelOf(Vec3(-0.01, 1, 1)).has_value());
  EXPECT_EQ(*g.VoxelOf(Vec3(0.15, 0.05, 0.25)), Index3(1, 0, 2));
}

TEST(ClassifyTest, Rules) {
  EXPECT_EQ(ClassifyVoxel(0.3, 0.0, 0.2), VoxelClass::kUnobserved);
  EXPECT_EQ(ClassifyVoxel(0.25, 1.0, 0.2), VoxelClass::kFree);
  EXPECT_EQ(ClassifyVoxel(0.2, 1.0, 0.2), VoxelClass::kOccupied);
  EXPECT_EQ(ClassifyVoxel(-0.1, 1.0, 0.2), VoxelClass::kOccupied);
}

TEST(IntegrateTest, SingleMeasuredPoint) {
  TsdfGrid grid = AxisGrid();
  const ObservedPoint pt{Vec3(1.0, 0.0, 0.0), Provenance::kMeasured};
  IntegrationConfig cfg;
  grid.Integrate(Vec3::Zero(), std::span(&pt, 1), cfg);
  const std::size_t i = VoxelAt(grid, Vec3(0.85, 0.0, 0.0));
  EXPECT_NEAR(grid.distance(i), 0.15, 1e-12);
  EXPECT_EQ(grid.weight(i), 1.0);

  grid.Integrate(Vec3::Zero(), std::span(&pt, 1), cfg);
  EXPECT_NEAR(grid.distance(i), 0.15, 1e-12);
  EXPECT_EQ(grid.weight(i), 2.0);
}

TEST(IntegrateTest, PredictedPointHasReducedWeight) {
  TsdfGrid grid = AxisGrid();
  IntegrationConfig cfg;
  const ObservedPoint a{Vec3(1.0, 0.0, 0.0), Provenance::kMeasured};
  const ObservedPoint b{Vec3(1.2, 0.0, 0.0), Provenance::kPredicted};
  grid.Integrate(Vec3::Zero(), std::span(&a, 1), cfg);
  grid.Integrate(Vec3::Zero(), std::span(&b, 1), cfg);
  const std::size_t i = VoxelAt(grid, Vec3(0.85, 0.0, 0.0));
  EXPECT_NEAR(grid.distance(i), (0.15 + 0.1 * 0.35) / 1.1, 1e-12);
  EXPECT_NEAR(grid.weight(i), 1.1, 1e-12);
}

TEST(IntegrateTest, TruncationAndRayExtent) {
  TsdfGrid grid = AxisGrid();
  const ObservedPoint pt{Vec3(1.0, 0.0, 0.0), Provenance::kMeasured};
  grid.Integrate(Vec3::Zero(), std::span(&pt, 1), IntegrationConfig{});
  EXPECT_NEAR(grid.distance(VoxelAt(grid, Vec3(0.05, 0, 0))), 0.4, 1e-12);
  EXPECT_NEAR(grid.distance(VoxelAt(grid, Vec3(1.35, 0, 0))), -0.35, 1e-12);
  EXPECT_EQ(grid.weight(VoxelAt(grid, Vec3(1.45, 0, 0))), 0.0);
}

TEST(IntegrateTest, RejectsMismatchedTruncationAndInvalidPoints) {
  TsdfGrid grid = AxisGrid();
  IntegrationConfig cfg;
  cfg.delta_trunc = 0.3;
  const ObservedPoint pt{Vec3(1.0, 0.0, 0.0), Provenance::kMeasured};
  EXPECT_THROW(grid.Integrate(Vec3::Zero(), std::span(&pt, 1), cfg), Error);
  const ObservedPoint bad{Vec3(1.0, 0.0, 0.0), Provenance::kInvalid};
  EXPECT_THROW(grid.Integrate(Vec3::Zero(), std::span(&bad, 1), IntegrationConfig{}), Error);
  cfg.delta_trunc = 0.1;
  EXPECT_THROW(cfg.Validate(0.1), Error);
}

TEST(IntegrateTest, RayMissingGridIsSkipped) {
  TsdfGrid grid = AxisGrid();
  const ObservedPoint pt{Vec3(0.0, 5.0, 5.0), Provenance::kMeasured};
  const IntegrationStats s = grid.Integrate(Vec3(0, 4, 4), std::span(&pt, 1), IntegrationConfig{});
  EXPECT_EQ(s.skipped, 1u);
  EXPECT_EQ(s.voxel_updates, 0u);
}

std::vector<ObservedPoint> RandomPoints(Rng& rng, int n) {
  std::vector<ObservedPoint> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back({Vec3(rng.Uniform(0.5, 1.9), rng.Uniform(-0.45, 0.45), rng.Uniform(-0.45, 0.45)),
                   rng.Uniform() < 0.5 ? Provenance::kMeasured : Provenance::kPredicted});
  }
  return pts;
}

TEST(IntegratePropertyTest, ConvexCombinationAndMonotoneWeight) {
  Rng rng(3);
  TsdfGrid grid = AxisGrid();
  IntegrationConfig cfg;
  for (int round = 0; round < 30; ++round) {
    const TsdfGrid before = grid;
    const ObservedPoint pt = RandomPoints(rng, 1).front();
    const Vec3 origin(0.0, rng.Uniform(-0.4, 0.4), rng.Uniform(-0.4, 0.4));
    TsdfGrid fresh = AxisGrid();
    fresh.Integrate(origin, std::span(&pt, 1), cfg);
    grid.Integrate(origin, std::span(&pt, 1), cfg);
    for (std::size_t i = 0; i < grid.geometry().VoxelCount(); ++i) {
      ASSERT_GE(grid.weight(i), before.weight(i));
      if (fresh.weight(i) == 0.0) {
        ASSERT_EQ(grid.distance(i), before.distance(i));
        continue;
      }
      const double d = fresh.distance(i);
      if (before.weight(i) == 0.0) {
        ASSERT_NEAR(grid.distance(i), d, 1e-12);
        continue;
      }
      ASSERT_GE(grid.distance(i), std::min(before.distance(i), d) - 1e-12);
      ASSERT_LE(grid.distance(i), std::max(before.distance(i), d) + 1e-12);
    }
  }
}

TEST(IntegratePropertyTest, OrderIndependence) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = RandomPoints(rng, 2);
    const std::vector<ObservedPoint> rev{pts[1], pts[0]};
    TsdfGrid a = AxisGrid();
    TsdfGrid b = AxisGrid();
    a.Integrate(Vec3::Zero(), pts, IntegrationConfig{});
    b.Integrate(Vec3::Zero(), rev, IntegrationConfig{});
    for (std::size_t i = 0; i < a.geometry().VoxelCount(); ++i) {
      ASSERT_NEAR(a.distance(i), b.distance(i), 1e-9);
      ASSERT_NEAR(a.weight(i), b.weight(i), 1e-9);
    }
  }
}

TEST(IntegratePropertyTest, MeasuredDominatesPredicted) {
  TsdfGrid grid = AxisGrid();
  const ObservedPoint pred{Vec3(1.3, 0.0, 0.0), Provenance::kPredicted};
  const ObservedPoint meas{Vec3(1.0, 0.0, 0.0), Provenance::kMeasured};
  grid.Integrate(Vec3::Zero(), std::span(&pred, 1), IntegrationConfig{});
  grid.Integrate(Vec3::Zero(), std::span(&meas, 1), IntegrationConfig{});
  const std::size_t i = VoxelAt(grid, Vec3(0.85, 0.0, 0.0));
  const double d_pred = 1.3 - 0.85;
  const double d_meas = 1.0 - 0.85;
  EXPECT_LE(std::abs(grid.distance(i) - d_meas), (0.1 / 1.1) * std::abs(d_pred - d_meas) + 1e-12);
}

TEST(IntegrateTest, QuadraticWeightsScaleWithRange) {
  TsdfGrid grid = AxisGrid();
  IntegrationConfig cfg;
  cfg.weight_mode = WeightMode::kQuadratic;
  const ObservedPoint pt{Vec3(1.0, 0.0, 0.0), Provenance::kMeasured};
  grid.Integrate(Vec3(-1.0, 0.0, 0.0), std::span(&pt, 1), cfg);
  EXPECT_NEAR(grid.weight(VoxelAt(grid, Vec3(0.85, 0, 0))), 0.25, 1e-12);
  // Far behind the surface the weight ramps down.
  EXPECT_LT(grid.weight(VoxelAt(grid, Vec3(1.35, 0, 0))), 0.25);
}

TEST(IntegrateTest, MaxWeightCaps) {
  TsdfGrid grid = AxisGrid();
  IntegrationConfig cfg;
  cfg.max_weight = 3.0;
  const ObservedPoint pt{Vec3(1.0, 0.0, 0.0), Provenance::kMeasured};
  for (int i = 0; i < 5; ++i) grid.Integrate(Vec3::Zero(), std::span(&pt, 1), cfg);
  EXPECT_EQ(grid.weight(VoxelAt(grid, Vec3(0.85, 0, 0))), 3.0);
}

TEST(TraverseTest, ConnectedAndCoversDenseSamples) {
  const TsdfGrid grid = AxisGrid();
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 a(rng.Uniform(0.01, 1.99), rng.Uniform(-0.49, 0.49), rng.Uniform(-0.49, 0.49));
    const Vec3 b(rng.Uniform(0.01, 1.99), rng.Uniform(-0.49, 0.49), rng.Uniform(-0.49, 0.49));
    const auto voxels = grid.Traverse(a, b);
    ASSERT_FALSE(voxels.empty());
    EXPECT_EQ(voxels.front(), *grid.geometry().VoxelOf(a));
    EXPECT_EQ(voxels.back(), *grid.geometry().VoxelOf(b));
    std::set<std::tuple<int, int, int>> seen;
    for (std::size_t i = 0; i < voxels.size(); ++i) {
      seen.insert({voxels[i].x(), voxels[i].y(), voxels[i].z()});
      if (i > 0) {
        ASSERT_EQ((voxels[i] - voxels[i - 1]).cwiseAbs().sum(), 1);
      }
    }
    for (int s = 0; s <= 2000; ++s) {
      const auto v = grid.geometry().VoxelOf(a + (b - a) * (s / 2000.0));
      ASSERT_TRUE(seen.count({v->x(), v->y(), v->z()}));
    }
  }
}

TEST(TraverseTest, BoundaryStepsIntoLargerIndex) {
  const TsdfGrid grid = AxisGrid();
  const auto voxels = grid.Traverse(Vec3(0.05, 0.0, 0.0), Vec3(0.35, 0.0, 0.0));
  ASSERT_EQ(voxels.size(), 4u);
  for (const Index3& v : voxels) {
    EXPECT_EQ(v.y(), 5);
    EXPECT_EQ(v.z(), 5);
  }
}

TEST(SerializationTest, RoundTrip) {
  TsdfGrid grid = AxisGrid();
  Rng rng(2);
  grid.Integrate(Vec3::Zero(), RandomPoints(rng, 50), IntegrationConfig{});
  const TsdfGrid back = TsdfGrid::Decode(grid.Encode());
  EXPECT_EQ(back.geometry(), grid.geometry());
  EXPECT_EQ(back.delta_trunc(), grid.delta_trunc());
  for (std::size_t i = 0; i < grid.geometry().VoxelCount(); ++i) {
    ASSERT_EQ(back.distance(i), static_cast<float>(grid.distance(i)));
    ASSERT_EQ(back.weight(i), static_cast<float>(grid.weight(i)));
  }
  auto bytes = grid.Encode();
  bytes[0] = 'X';
  EXPECT_THROW(TsdfGrid::Decode(bytes), Error);
}

TEST(BackprojectFrameTest, StrideAndProvenance) {
  const Intrinsics intr = Intrinsics::FromHorizontalFov(4, 4, 90.0);
  DepthFrame depth(4, 4, 2.0);
  depth(0, 0) = 0.0;
  ProvenanceMask prov(4, 4, Provenance::kPredicted);
  prov(2, 2) = Provenance::kInvalid;
  prov(0, 2) = Provenance::kMeasured;
  const auto all = BackprojectFrame(depth, nullptr, Pose{}, intr);
  EXPECT_EQ(all.size(), 15u);
  const auto strided = BackprojectFrame(depth, &prov, Pose{}, intr, 2);
  // (0,0) invalid depth, (2,2) invalid label; (0,2) and (2,0) remain.
  ASSERT_EQ(strided.size(), 2u);
  EXPECT_EQ(strided[0].provenance, Provenance::kMeasured);
  EXPECT_EQ(strided[1].provenance, Provenance::kPredicted);
  EXPECT_THROW(BackprojectFrame(DepthFrame(3, 4), nullptr, Pose{}, intr), Error);
}

TEST(FlatWallTest, ZeroCrossingAndRmse) {
  Scene scene;
  scene.bounds = {Vec3(0, -5, -5), Vec3(10, 5, 5)};
  const Intrinsics intr = Intrinsics::Default();
  const Pose pose = Pose::LookingAlong(Vec3(7, 0, 0), 0.0);
  const DepthFrame depth = RenderDepth(scene, pose, intr);
  GridGeometry g;
  g.origin = Vec3(8.0, -1.0, -1.0);
  g.voxel_size = 0.1;
  g.dims = {30, 20, 20};
  TsdfGrid grid(g, 0.4);
  grid.Integrate(pose.translation, BackprojectFrame(depth, nullptr, pose, intr),
                 IntegrationConfig{});
  double sq = 0.0;
  int n = 0;
  int crossings = 0;
  for (int k = 0; k < 20; ++k) {
    for (int j = 0; j < 20; ++j) {
      for (int i = 0; i + 1 < 30; ++i) {
        const std::size_t a = g.Index(i, j, k);
        const std::size_t b = g.Index(i + 1, j, k);
        const double x = g.Center(i, j, k).x();
        if (grid.weight(a) > 0.0 && std::abs(10.0 - x) < 0.4) {
          sq += std::pow(grid.distance(a) - (10.0 - x), 2);
          ++n;
        }
        if (grid.weight(a) == 0.0 || grid.weight(b) == 0.0) continue;
        if (grid.distance(a) > 0.0 && grid.distance(b) <= 0.0) {
          const double xc = x + 0.1 * grid.distance(a) / (grid.distance(a) - grid.distance(b));
          ASSERT_LE(std::abs(xc - 10.0), 0.05);
          ++crossings;
        }
      }
    }
  }
  EXPECT_EQ(crossings, 400);
  ASSERT_GT(n, 0);
  EXPECT_LE(std::sqrt(sq / n), 0.1);
}

}  // namespace
}  // namespace augplan
