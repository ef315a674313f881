#pragma once

#include <cstddef>
#include <cstdint>

#include "augplan/frames.hpp"

namespace augplan {

struct SparsifyConfig {
  /// Fraction of in-range valid pixels to keep, in (0, 1].
  double p = 0.25;
  /// Range cutoff in meters.
  double r_max = 5.0;
  /// Gaussian blur applied before the gradient, in pixels.
  double blur_sigma = 1.0;
  /// Reinstate pixels 8-adjacent to a kept pixel.
  bool dilate = false;
  /// Apply the range-dependent depth noise after selection.
  bool noise = false;
  std::uint64_t seed = 0;

  void Validate() const;
  bool operator==(const SparsifyConfig&) const = default;
};

/// Separable Gaussian blur, kernel radius ceil(3 sigma), replicated borders.
/// sigma == 0 returns the input unchanged.
GrayFrame GaussianBlur(const GrayFrame& gray, double sigma);

/// |grad| of the blurred image using central differences, one-sided at the
/// borders.
ScalarField GradientMagnitude(const GrayFrame& gray, double blur_sigma);

/// floor(p * n), guarded against p * n landing a rounding error below an
/// integer.
std::size_t RetainCount(double p, std::size_t n);

/// Keeps the floor(p * count) in-range pixels with the largest image
/// gradient (ties to the smaller row-major index). Kept pixels carry their
/// ground-truth depth. `frame_id` keys the noise stream.
DepthFrame Sparsify(const DepthFrame& depth_gt, const GrayFrame& gray,
                    const SparsifyConfig& cfg, std::uint64_t frame_id = 0);

/// Axial noise standard deviation at depth z (meters).
constexpr double NoiseSigma(double z) {
  return 0.0012 + 0.0019 * (z - 0.4) * (z - 0.4);
}

/// Perturbs every valid pixel with N(0, NoiseSigma(z)^2), floored at 1 mm.
/// Deterministic in (seed, frame_id, pixel index).
DepthFrame ApplyNoise(const DepthFrame& depth, std::uint64_t seed,
                      std::uint64_t frame_id = 0);

}  // namespace augplan
