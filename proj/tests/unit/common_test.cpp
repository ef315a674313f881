#include "augplan/common.hpp"

#include <cmath>
#include <string>

#include <gtest/gtest.h>

namespace augplan {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, UniformStaysInRange) {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double w = rng.Uniform(-2.0, 3.0);
    ASSERT_GE(w, -2.0);
    ASSERT_LT(w, 3.0);
    ASSERT_LT(rng.Below(5), 5u);
  }
}

TEST(RngTest, NormalMoments) {
  Rng rng(3);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 1.0, 0.01);
}

TEST(RngTest, InBallStaysInBall) {
  Rng rng(11);
  const Vec3 c(1.0, -2.0, 0.5);
  for (int i = 0; i < 5000; ++i) {
    ASSERT_LE((rng.InBall(c, 2.0) - c).norm(), 2.0 + 1e-12);
  }
}

TEST(SeedTest, DerivedStreamsDiffer) {
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(1, 1));
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(2, 0));
  EXPECT_EQ(DeriveSeed(5, 9), DeriveSeed(5, 9));
}

TEST(SeedTest, CounterNormalIsAddressable) {
  EXPECT_EQ(CounterNormal(1, 2, 3), CounterNormal(1, 2, 3));
  EXPECT_NE(CounterNormal(1, 2, 3), CounterNormal(1, 2, 4));
}

TEST(DigestTest, KnownFnvValues) {
  EXPECT_EQ(Fnv1aHex(""), "cbf29ce484222325");
  EXPECT_EQ(Fnv1aHex("a"), "af63dc4c8601ec8c");
}

TEST(ErrorTest, MessageCarriesCode) {
  const Error e(ErrorCode::kInvalidDepth, "bad");
  EXPECT_EQ(e.code(), ErrorCode::kInvalidDepth);
  EXPECT_EQ(std::string(e.what()), std::string(ToString(ErrorCode::kInvalidDepth)) + ": bad");
}

}  // namespace
}  // namespace augplan
