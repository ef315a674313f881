#include "augplan/esdf.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

namespace augplan {
namespace {

GridGeometry Cube(int nx, int ny, int nz, double v = 0.1) {
  GridGeometry g;
  g.voxel_size = v;
  g.dims = {nx, ny, nz};
  return g;
}

std::vector<std::uint8_t> RandomMask(const GridGeometry& g, double density, Rng& rng) {
  std::vector<std::uint8_t> m(g.VoxelCount());
  for (auto& x : m) x = rng.Uniform() < density ? 1 : 0;
  return m;
}

std::vector<double> BruteForce(const GridGeometry& g, const std::vector<std::uint8_t>& mask,
                               double d_cap) {
  std::vector<Vec3> obstacles;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) obstacles.push_back(g.Center(g.Unflatten(i)));
  }
  std::vector<double> out(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const Vec3 c = g.Center(g.Unflatten(i));
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& o : obstacles) best = std::min(best, (c - o).squaredNorm());
    out[i] = std::min(std::sqrt(best), d_cap);
  }
  return out;
}

TEST(EsdfTest, SingleObstacleLine) {
  const GridGeometry g = Cube(3, 1, 1);
  const std::vector<std::uint8_t> mask{0, 1, 0};
  const EsdfGrid e = EsdfGrid::FromObstacles(g, mask, 5.0);
  EXPECT_NEAR(e.At(0), 0.1, 1e-15);
  EXPECT_EQ(e.At(1), 0.0);
  EXPECT_NEAR(e.At(2), 0.1, 1e-15);
}

TEST(EsdfTest, NoObstaclesIsCap) {
  const GridGeometry g = Cube(6, 5, 4);
  const EsdfGrid e = EsdfGrid::FromObstacles(g, std::vector<std::uint8_t>(g.VoxelCount(), 0), 2.5);
  for (double d : e.distances()) EXPECT_EQ(d, 2.5);
}

TEST(EsdfTest, MatchesBruteForceOn32Cube) {
  Rng rng(32);
  const GridGeometry g = Cube(32, 32, 32);
  const auto mask = RandomMask(g, 0.02, rng);
  const EsdfGrid e = EsdfGrid::FromObstacles(g, mask, 100.0);
  const auto want = BruteForce(g, mask, 100.0);
  for (std::size_t i = 0; i < want.size(); ++i) ASSERT_NEAR(e.At(i), want[i], 1e-9);
}

TEST(EsdfPropertyTest, MatchesBruteForceOnRandomShapes) {
  Rng rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    const GridGeometry g = Cube(1 + static_cast<int>(rng.Below(20)), 1 + static_cast<int>(rng.Below(20)),
                                1 + static_cast<int>(rng.Below(20)), rng.Uniform(0.05, 0.3));
    const auto mask = RandomMask(g, rng.Uniform(0.0, 0.2), rng);
    const double cap = rng.Uniform(0.3, 3.0);
    const EsdfGrid e = EsdfGrid::FromObstacles(g, mask, cap);
    const auto want = BruteForce(g, mask, cap);
    for (std::size_t i = 0; i < want.size(); ++i) ASSERT_NEAR(e.At(i), want[i], 1e-9);
  }
}

TEST(EsdfPropertyTest, LipschitzAndMonotone) {
  Rng rng(6);
  const GridGeometry g = Cube(24, 20, 16);
  auto mask = RandomMask(g, 0.01, rng);
  const EsdfGrid before = EsdfGrid::FromObstacles(g, mask, 5.0);
  for (int k = 0; k < 16; ++k) {
    for (int j = 0; j < 20; ++j) {
      for (int i = 0; i < 24; ++i) {
        const double d = before.At(g.Index(i, j, k));
        if (i + 1 < 24) {
          ASSERT_LE(std::abs(d - before.At(g.Index(i + 1, j, k))), 0.1 + 1e-12);
        }
        if (j + 1 < 20) {
          ASSERT_LE(std::abs(d - before.At(g.Index(i, j + 1, k))), 0.1 + 1e-12);
        }
        if (k + 1 < 16) {
          ASSERT_LE(std::abs(d - before.At(g.Index(i, j, k + 1))), 0.1 + 1e-12);
        }
      }
    }
  }
  for (int added = 0; added < 10; ++added) mask[rng.Below(mask.size())] = 1;
  const EsdfGrid after = EsdfGrid::FromObstacles(g, mask, 5.0);
  for (std::size_t i = 0; i < mask.size(); ++i) ASSERT_LE(after.At(i), before.At(i));
}

EsdfGrid LinearField() {
  const GridGeometry g = Cube(10, 6, 6, 0.2);
  std::vector<double> d(g.VoxelCount());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = g.Center(g.Unflatten(i)).x();
  return EsdfGrid(g, 10.0, d);
}

TEST(QueryTest, VoxelCenterMatchesStoredValue) {
  Rng rng(9);
  const GridGeometry g = Cube(12, 10, 8);
  const EsdfGrid e = EsdfGrid::FromObstacles(g, RandomMask(g, 0.05, rng), 5.0);
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 10; ++j)
      for (int i = 0; i < 12; ++i) ASSERT_NEAR(e.Distance(g.Center(i, j, k)), e.At(g.Index(i, j, k)), 1e-12);
}

TEST(QueryTest, LinearFieldGradient) {
  const EsdfGrid e = LinearField();
  const EsdfGrid::Sample s = e.Query(Vec3(0.93, 0.61, 0.57));
  EXPECT_NEAR(s.distance, 0.93, 1e-12);
  EXPECT_NEAR(s.gradient.x(), 1.0, 1e-9);
  EXPECT_NEAR(s.gradient.y(), 0.0, 1e-9);
  EXPECT_NEAR(s.gradient.z(), 0.0, 1e-9);
}

TEST(QueryTest, OutsideGridThrows) {
  const EsdfGrid e = LinearField();
  try {
    e.Distance(Vec3(-1.0, 0.5, 0.5));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kOutOfGrid);
  }
  EXPECT_FALSE(e.InDomain(Vec3(0.05, 0.5, 0.5)));
  EXPECT_TRUE(e.InDomain(Vec3(0.1, 0.5, 0.5)));
}

TEST(ClearanceTest, EmptyMapPasses) {
  const GridGeometry g = Cube(40, 40, 10);
  const EsdfGrid e = EsdfGrid::FromObstacles(g, std::vector<std::uint8_t>(g.VoxelCount(), 0), 5.0);
  const std::vector<Vec3> line{Vec3(0.3, 0.3, 0.5), Vec3(3.5, 3.7, 0.5), Vec3(0.5, 3.0, 0.6)};
  EXPECT_TRUE(ClearanceCheck(e, line, 1.0, 0.05));
}

TEST(ClearanceTest, NearObstacle) {
  const GridGeometry g = Cube(40, 40, 10);
  std::vector<std::uint8_t> mask(g.VoxelCount(), 0);
  mask[g.Index(20, 20, 5)] = 1;
  const EsdfGrid e = EsdfGrid::FromObstacles(g, mask, 5.0);
  const Vec3 obstacle = g.Center(20, 20, 5);
  // Passes 0.2 m from the obstacle center (closest point at x = obstacle.x).
  const std::vector<Vec3> line{obstacle + Vec3(-1.5, 0.2, 0.0), obstacle + Vec3(1.5, 0.2, 0.0)};
  EXPECT_FALSE(ClearanceCheck(e, line, 0.25, 0.05));
  EXPECT_TRUE(ClearanceCheck(e, line, 0.0, 0.05));
  EXPECT_THROW(ClearanceCheck(e, line, 0.25, 0.0), Error);
}

TEST(ObstacleMaskTest, UnknownHandling) {
  const GridGeometry g = Cube(80, 80, 80);
  const TsdfGrid tsdf(g, 0.4);
  EsdfConfig cfg;
  cfg.unknown_is_obstacle = false;
  cfg.robot_pos = Vec3(4.0, 4.0, 4.0);
  cfg.unknown_sphere_radius = 3.0;
  const EsdfGrid e = ComputeEsdf(tsdf, cfg);
  const double v = g.voxel_size;
  int outside_checked = 0;
  for (std::size_t i = 0; i < g.VoxelCount(); ++i) {
    const double r = (g.Center(g.Unflatten(i)) - cfg.robot_pos).norm();
    if (r <= 3.0) {
      ASSERT_EQ(e.At(i), 0.0);
    } else if (r <= 3.0 + v) {
      ASSERT_LE(e.At(i), v * std::sqrt(3.0) + 1e-12);
      ++outside_checked;
    }
  }
  EXPECT_GT(outside_checked, 0);

  cfg.unknown_is_obstacle = true;
  const Sphere clear{Vec3(1.0, 1.0, 1.0), 0.5};
  const auto mask = ObstacleMask(tsdf, cfg, std::span(&clear, 1));
  EXPECT_EQ(mask[g.Index(*g.VoxelOf(Vec3(1.0, 1.0, 1.0)))], 0);
  EXPECT_EQ(mask[g.Index(*g.VoxelOf(Vec3(2.0, 1.0, 1.0)))], 1);
}

TEST(ObstacleMaskTest, ClassifiesObservedVoxels) {
  const GridGeometry g = Cube(3, 1, 1);
  TsdfGrid tsdf(g, 0.4);
  tsdf.Set(0, 0.3, 1.0);
  tsdf.Set(1, 0.2, 1.0);
  EsdfConfig cfg;
  const auto mask = ObstacleMask(tsdf, cfg);
  EXPECT_EQ(mask, (std::vector<std::uint8_t>{0, 1, 1}));
  cfg.unknown_is_obstacle = false;
  EXPECT_EQ(ObstacleMask(tsdf, cfg), (std::vector<std::uint8_t>{0, 1, 0}));
}

TEST(EsdfSerializationTest, RoundTrip) {
  Rng rng(1);
  const GridGeometry g = Cube(7, 5, 3);
  const EsdfGrid e = EsdfGrid::FromObstacles(g, RandomMask(g, 0.1, rng), 3.0);
  const EsdfGrid back = EsdfGrid::Decode(e.Encode());
  EXPECT_EQ(back.geometry(), g);
  EXPECT_EQ(back.d_cap(), 3.0);
  for (std::size_t i = 0; i < g.VoxelCount(); ++i) {
    ASSERT_EQ(back.At(i), static_cast<float>(e.At(i)));
  }
}

TEST(EsdfConfigTest, Validation) {
  EsdfConfig cfg;
  cfg.d_cap = 0.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = EsdfConfig{};
  cfg.unknown_sphere_radius = -1.0;
  EXPECT_THROW(cfg.Validate(), Error);
}

}  // namespace
}  // namespace augplan
