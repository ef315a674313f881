#include "augplan/mapeval.hpp"

#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace augplan {
namespace {

GridGeometry Line(int n) {
  GridGeometry g;
  g.dims = {n, 1, 1};
  return g;
}

TsdfGrid RandomMap(const GridGeometry& g, std::uint64_t seed) {
  Rng rng(seed);
  TsdfGrid m(g, 0.4);
  for (std::size_t i = 0; i < g.VoxelCount(); ++i) {
    if (rng.Uniform() < 0.3) continue;
    m.Set(i, rng.Uniform(-0.4, 0.4), rng.Uniform(0.1, 5.0));
  }
  return m;
}

TEST(CompareMapsTest, IdentityIsPerfect) {
  const TsdfGrid gt = RandomMap(Line(500), 1);
  const MapComparison c = CompareMaps(gt, gt);
  EXPECT_EQ(c.false_pos_rate, 0.0);
  EXPECT_EQ(c.false_neg_rate, 0.0);
  EXPECT_EQ(c.coverage, 1.0);
  EXPECT_EQ(c.rmse_observed, 0.0);
}

TEST(CompareMapsTest, HandEvaluatedTwoVoxels) {
  TsdfGrid gt(Line(2), 0.4);
  gt.Set(0, 0.35, 1.0);  // Free
  gt.Set(1, 0.0, 1.0);   // Occupied
  TsdfGrid test(Line(2), 0.4);
  test.Set(1, 0.3, 1.0);  // Free where gt is Occupied
  const MapComparison c = CompareMaps(test, gt);
  EXPECT_EQ(c.false_pos_rate, 1.0);
  EXPECT_EQ(c.false_neg_rate, 1.0);
  EXPECT_EQ(c.coverage, 0.5);
  EXPECT_NEAR(c.rmse_observed, 0.3, 1e-15);
}

TEST(CompareMapsTest, StrictFalseNegatives) {
  TsdfGrid gt(Line(2), 0.4);
  gt.Set(0, 0.0, 1.0);
  gt.Set(1, 0.0, 1.0);
  const TsdfGrid test(Line(2), 0.4);
  EXPECT_EQ(CompareMaps(test, gt).false_neg_rate, 0.0);
  EXPECT_EQ(CompareMaps(test, gt, {0.2, true}).false_neg_rate, 1.0);
}

TEST(CompareMapsTest, AlignmentMismatch) {
  try {
    CompareMaps(TsdfGrid(Line(3), 0.4), TsdfGrid(Line(4), 0.4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlignmentMismatch);
  }
}

TEST(CompareMapsTest, MatchesCountingOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TsdfGrid gt = RandomMap(Line(2000), seed);
    const TsdfGrid test = RandomMap(Line(2000), seed + 100);
    std::size_t free_gt = 0, occ_gt = 0, fp = 0, fn = 0, obs_gt = 0, both = 0;
    double sq = 0.0;
    for (std::size_t i = 0; i < 2000; ++i) {
      if (gt.weight(i) == 0.0) continue;
      ++obs_gt;
      const bool gt_free = gt.distance(i) > 0.2;
      const bool test_seen = test.weight(i) > 0.0;
      const bool test_free = test_seen && test.distance(i) > 0.2;
      if (gt_free) {
        ++free_gt;
        fp += !test_free;
      } else {
        ++occ_gt;
        fn += test_free;
      }
      if (test_seen) {
        ++both;
        sq += std::pow(test.distance(i) - gt.distance(i), 2);
      }
    }
    const MapComparison c = CompareMaps(test, gt);
    EXPECT_EQ(c.false_pos, fp);
    EXPECT_EQ(c.false_neg, fn);
    EXPECT_EQ(c.false_pos_rate, static_cast<double>(fp) / free_gt);
    EXPECT_EQ(c.false_neg_rate, static_cast<double>(fn) / occ_gt);
    EXPECT_EQ(c.coverage, static_cast<double>(both) / obs_gt);
    EXPECT_NEAR(c.rmse_observed, std::sqrt(sq / both), 1e-9);
  }
}

TEST(CompareMapsTest, JsonCarriesRates) {
  const TsdfGrid gt = RandomMap(Line(50), 4);
  const nlohmann::json j = ToJson(CompareMaps(gt, gt));
  EXPECT_EQ(j.at("coverage").get<double>(), 1.0);
  EXPECT_TRUE(j.contains("false_neg_rate"));
}

}  // namespace
}  // namespace augplan
