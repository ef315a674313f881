#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace augplan {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

enum class ErrorCode {
  kInvalidArgument,
  kInvalidDepth,
  kIo,
  kMalformedHeader,
  kOutOfRange,
  kPlacementFailure,
  kResolutionMismatch,
  kNoSupport,
  kEmptyMask,
  kMissingPrediction,
  kAlignmentMismatch,
  kOutOfGrid,
  kValidation,
};

std::string_view ToString(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ToString(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// SplitMix64 finalizer. Used for seed derivation and counter-based streams.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return Mix64(seed ^ Mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Maps 64 random bits to a double in [0, 1) using the top 53 bits.
constexpr double BitsToUnit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Deterministic random stream. Every distribution is derived by hand from
/// the raw 64-bit output so results are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t NextU64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double Uniform() { return BitsToUnit(NextU64()); }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n) {
    return static_cast<std::uint64_t>(Uniform() * static_cast<double>(n)) % n;
  }

  double Normal();

  /// Uniform point in the closed ball of the given radius around center.
  Vec3 InBall(const Vec3& center, double radius);

 private:
  std::uint64_t state_;
};

/// Standard normal sample that depends only on (seed, stream, index).
double CounterNormal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t index);

/// 64-bit FNV-1a digest, hex encoded.
std::string Fnv1aHex(std::string_view bytes);

}  // namespace augplan
