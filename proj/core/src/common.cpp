#include "augplan/common.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace augplan {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidDepth: return "invalid-depth";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kPlacementFailure: return "placement-failure";
    case ErrorCode::kResolutionMismatch: return "resolution-mismatch";
    case ErrorCode::kNoSupport: return "no-support";
    case ErrorCode::kEmptyMask: return "empty-mask";
    case ErrorCode::kMissingPrediction: return "missing-prediction";
    case ErrorCode::kAlignmentMismatch: return "alignment-mismatch";
    case ErrorCode::kOutOfGrid: return "out-of-grid";
    case ErrorCode::kValidation: return "validation-error";
  }
  return "unknown-error";
}

namespace {

double BoxMuller(double u1, double u2) {
  // u1 in (0, 1] keeps the log finite.
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double Rng::Normal() {
  const double u1 = 1.0 - Uniform();
  const double u2 = Uniform();
  return BoxMuller(u1, u2);
}

Vec3 Rng::InBall(const Vec3& center, double radius) {
  while (true) {
    const Vec3 p(Uniform(-1.0, 1.0), Uniform(-1.0, 1.0), Uniform(-1.0, 1.0));
    if (p.squaredNorm() <= 1.0) return center + radius * p;
  }
}

double CounterNormal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t index) {
  const std::uint64_t key = DeriveSeed(DeriveSeed(seed, stream), index);
  const double u1 = 1.0 - BitsToUnit(Mix64(key));
  const double u2 = BitsToUnit(Mix64(key ^ 0xd1b54a32d192ed03ULL));
  return BoxMuller(u1, u2);
}

std::string Fnv1aHex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace augplan
