#include "augplan/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

namespace augplan {
namespace {

struct RandomPair {
  DepthFrame depth;
  GrayFrame gray;
};

RandomPair RandomFrames(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  RandomPair f{DepthFrame(w, h), GrayFrame(w, h)};
  for (std::size_t i = 0; i < f.depth.size(); ++i) {
    f.depth[i] = rng.Uniform() < 0.15 ? 0.0 : rng.Uniform(0.3, 9.0);
    f.gray[i] = rng.Uniform();
  }
  return f;
}

TEST(GradientTest, ConstantFrameIsZero) {
  const ScalarField g = GradientMagnitude(GrayFrame(9, 7, 0.4), 1.0);
  for (double v : g.values()) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(GradientTest, StepEdgeWithoutBlur) {
  GrayFrame gray(8, 5);
  for (int r = 0; r < 5; ++r)
    for (int c = 4; c < 8; ++c) gray(r, c) = 1.0;
  const ScalarField g = GradientMagnitude(gray, 0.0);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 8; ++c) {
      EXPECT_DOUBLE_EQ(g(r, c), (c == 3 || c == 4) ? 0.5 : 0.0);
    }
  }
}

TEST(BlurTest, ImpulseMassIsPreserved) {
  GrayFrame gray(41, 41);
  gray(20, 20) = 1.0;
  for (double sigma : {0.5, 1.0, 2.5}) {
    const GrayFrame b = GaussianBlur(gray, sigma);
    double mass = 0.0;
    for (double v : b.values()) mass += v;
    EXPECT_NEAR(mass, 1.0, 1e-6);
    EXPECT_NEAR(b(20, 19), b(19, 20), 1e-15);
  }
  EXPECT_EQ(GaussianBlur(gray, 0.0), gray);
}

TEST(RetainCountTest, FloorWithRoundingGuard) {
  EXPECT_EQ(RetainCount(0.25, 10), 2u);
  EXPECT_EQ(RetainCount(2.0 / 9.0, 9), 2u);
  EXPECT_EQ(RetainCount(0.1, 30), 3u);
  EXPECT_EQ(RetainCount(1.0, 17), 17u);
  // Oracle in exact integer arithmetic with p = a / b.
  for (std::size_t b = 1; b <= 40; ++b) {
    for (std::size_t a = 1; a <= b; ++a) {
      for (std::size_t n : {0u, 1u, 7u, 97u, 1000u, 76800u}) {
        ASSERT_EQ(RetainCount(static_cast<double>(a) / b, n), a * n / b)
            << a << "/" << b << " n=" << n;
      }
    }
  }
}

TEST(SparsifyTest, KeepEverything) {
  const RandomPair f = RandomFrames(20, 15, 1);
  SparsifyConfig cfg;
  cfg.p = 1.0;
  cfg.r_max = std::numeric_limits<double>::infinity();
  EXPECT_EQ(Sparsify(f.depth, f.gray, cfg), f.depth);
}

TEST(SparsifyTest, BeyondRangeIsDropped) {
  const DepthFrame depth(10, 8, 6.0);
  SparsifyConfig cfg;
  cfg.p = 1.0;
  cfg.r_max = 5.0;
  const DepthFrame out = Sparsify(depth, GrayFrame(10, 8, 0.5), cfg);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(SparsifyTest, TopTwoOfNine) {
  const RandomPair f = [] {
    RandomPair p = RandomFrames(3, 3, 12);
    for (double& d : p.depth.values()) d = 2.0;
    return p;
  }();
  const ScalarField grad = GradientMagnitude(f.gray, 0.0);
  std::vector<std::size_t> order(9);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return grad[a] > grad[b]; });
  ASSERT_GT(grad[order[1]], grad[order[2]]);
  SparsifyConfig cfg;
  cfg.p = 2.0 / 9.0;
  cfg.blur_sigma = 0.0;
  const DepthFrame out = Sparsify(f.depth, f.gray, cfg);
  for (std::size_t i = 0; i < 9; ++i) {
    const bool top = i == order[0] || i == order[1];
    EXPECT_EQ(out[i] > 0.0, top) << i;
  }
}

TEST(SparsifyTest, TiesGoToSmallerIndex) {
  SparsifyConfig cfg;
  cfg.p = 0.5;
  const DepthFrame out = Sparsify(DepthFrame(4, 2, 1.0), GrayFrame(4, 2, 0.3), cfg);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(out[i] > 0.0, i < 4);
}

TEST(SparsifyTest, ResolutionMismatchThrows) {
  EXPECT_THROW(Sparsify(DepthFrame(4, 2, 1.0), GrayFrame(4, 3), SparsifyConfig{}), Error);
}

TEST(SparsifyTest, InvalidConfigThrows) {
  SparsifyConfig cfg;
  cfg.p = 0.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.p = 1.5;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.p = 0.5;
  cfg.r_max = 0.0;
  EXPECT_THROW(cfg.Validate(), Error);
}

class SparsifyPropertyTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(SparsifyPropertyTest, CountSubsetRangeAndOptimality) {
  Rng rng(GetParam());
  const int w = 1 + static_cast<int>(rng.Below(64));
  const int h = 1 + static_cast<int>(rng.Below(64));
  const RandomPair f = RandomFrames(w, h, GetParam() + 1000);
  SparsifyConfig cfg;
  cfg.p = rng.Uniform(0.01, 1.0);
  cfg.r_max = rng.Uniform(1.0, 9.0);
  cfg.blur_sigma = rng.Uniform() < 0.3 ? 0.0 : rng.Uniform(0.3, 2.0);
  const DepthFrame out = Sparsify(f.depth, f.gray, cfg);
  const ScalarField grad = GradientMagnitude(f.gray, cfg.blur_sigma);

  std::size_t in_range = 0;
  std::size_t kept = 0;
  double weakest_kept = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool eligible = f.depth[i] > 0.0 && f.depth[i] <= cfg.r_max;
    in_range += eligible;
    if (out[i] > 0.0) {
      ++kept;
      ASSERT_TRUE(eligible);
      ASSERT_EQ(out[i], f.depth[i]);
      ASSERT_LE(out[i], cfg.r_max);
      weakest_kept = std::min(weakest_kept, grad[i]);
    }
  }
  ASSERT_EQ(kept, static_cast<std::size_t>(std::floor(cfg.p * in_range + 1e-9)));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool eligible = f.depth[i] > 0.0 && f.depth[i] <= cfg.r_max;
    if (eligible && out[i] == 0.0) {
      ASSERT_LE(grad[i], weakest_kept);
    }
  }

  cfg.dilate = true;
  const DepthFrame dilated = Sparsify(f.depth, f.gray, cfg);
  std::size_t kept_dilated = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] > 0.0) {
      ASSERT_EQ(dilated[i], out[i]);
    }
    if (dilated[i] > 0.0) {
      ++kept_dilated;
      ASSERT_EQ(dilated[i], f.depth[i]);
    }
  }
  ASSERT_GE(kept_dilated, kept);
  ASSERT_LE(kept_dilated, in_range);
}

INSTANTIATE_TEST_SUITE_P(Random, SparsifyPropertyTest, ::testing::Range<std::uint64_t>(0, 40));

TEST(NoiseTest, SigmaValues) {
  EXPECT_DOUBLE_EQ(NoiseSigma(0.4), 0.0012);
  EXPECT_NEAR(NoiseSigma(2.4), 0.0088, 1e-15);
}

TEST(NoiseTest, Deterministic) {
  const RandomPair f = RandomFrames(30, 20, 5);
  EXPECT_EQ(ApplyNoise(f.depth, 17, 3), ApplyNoise(f.depth, 17, 3));
  EXPECT_NE(ApplyNoise(f.depth, 17, 3), ApplyNoise(f.depth, 18, 3));
  EXPECT_NE(ApplyNoise(f.depth, 17, 3), ApplyNoise(f.depth, 17, 4));
}

TEST(NoiseTest, InvalidUntouchedAndPositive) {
  DepthFrame d(100, 100, 0.0);
  for (std::size_t i = 0; i < d.size(); i += 2) d[i] = 0.002;
  const DepthFrame n = ApplyNoise(d, 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) {
      ASSERT_EQ(n[i], 0.0);
    } else {
      ASSERT_GE(n[i], 0.001);
    }
  }
}

TEST(NoiseTest, SampleStdMatchesModel) {
  for (double z : {0.4, 2.4, 5.0}) {
    const DepthFrame d(500, 200, z);
    const DepthFrame n = ApplyNoise(d, 23);
    double sum = 0.0;
    double sq = 0.0;
    for (double v : n.values()) {
      sum += v - z;
      sq += (v - z) * (v - z);
    }
    const double count = static_cast<double>(n.size());
    const double mean = sum / count;
    const double std = std::sqrt(sq / count - mean * mean);
    EXPECT_NEAR(std / NoiseSigma(z), 1.0, 0.03) << z;
  }
}

TEST(NoiseTest, SparsifyWithNoiseStaysNearRange) {
  const RandomPair f = RandomFrames(64, 48, 8);
  SparsifyConfig cfg;
  cfg.noise = true;
  cfg.seed = 3;
  const DepthFrame out = Sparsify(f.depth, f.gray, cfg);
  for (double v : out.values()) ASSERT_LE(v, cfg.r_max + 6 * NoiseSigma(cfg.r_max));
}

}  // namespace
}  // namespace augplan
