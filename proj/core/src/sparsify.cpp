#include "augplan/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace augplan {

void SparsifyConfig::Validate() const {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kValidation, "sparsify.p must lie in (0, 1]");
  }
  if (!(r_max > 0.0)) {
    throw Error(ErrorCode::kValidation, "sparsify.r_max must be positive");
  }
  if (!(blur_sigma >= 0.0) || !std::isfinite(blur_sigma)) {
    throw Error(ErrorCode::kValidation, "sparsify.blur_sigma must be >= 0");
  }
}

GrayFrame GaussianBlur(const GrayFrame& gray, double sigma) {
  if (sigma <= 0.0) return gray;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
  }
  const double sum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (double& w : kernel) w /= sum;

  const int w = gray.width();
  const int h = gray.height();
  GrayFrame tmp(w, h);
  GrayFrame out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * gray(r, std::clamp(c + k, 0, w - 1));
      }
      tmp(r, c) = acc;
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp(std::clamp(r + k, 0, h - 1), c);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

ScalarField GradientMagnitude(const GrayFrame& gray, double blur_sigma) {
  const GrayFrame g = GaussianBlur(gray, blur_sigma);
  const int w = g.width();
  const int h = g.height();
  ScalarField mag(w, h);
  auto diff = [](double lo, double hi, int span) { return (hi - lo) / span; };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double gx = 0.0;
      double gy = 0.0;
      if (w > 1) {
        const int c0 = std::max(c - 1, 0);
        const int c1 = std::min(c + 1, w - 1);
        gx = diff(g(r, c0), g(r, c1), c1 - c0);
      }
      if (h > 1) {
        const int r0 = std::max(r - 1, 0);
        const int r1 = std::min(r + 1, h - 1);
        gy = diff(g(r0, c), g(r1, c), r1 - r0);
      }
      mag(r, c) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return mag;
}

std::size_t RetainCount(double p, std::size_t n) {
  const double exact = p * static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(exact + 1e-9 * (1.0 + exact)));
}

DepthFrame Sparsify(const DepthFrame& depth_gt, const GrayFrame& gray,
                    const SparsifyConfig& cfg, std::uint64_t frame_id) {
  cfg.Validate();
  if (!depth_gt.SameShape(gray)) {
    throw Error(ErrorCode::kResolutionMismatch,
                "depth and gray frames differ in resolution");
  }
  auto in_range = [&](double d) { return d > 0.0 && d <= cfg.r_max; };

  const ScalarField grad = GradientMagnitude(gray, cfg.blur_sigma);
  std::vector<std::size_t> candidates;
  candidates.reserve(depth_gt.size());
  for (std::size_t i = 0; i < depth_gt.size(); ++i) {
    if (in_range(depth_gt[i])) candidates.push_back(i);
  }
  const std::size_t keep = RetainCount(cfg.p, candidates.size());
  auto stronger = [&](std::size_t a, std::size_t b) {
    if (grad[a] != grad[b]) return grad[a] > grad[b];
    return a < b;
  };
  if (keep < candidates.size()) {
    std::nth_element(candidates.begin(),
                     candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                     candidates.end(), stronger);
    candidates.resize(keep);
  }

  DepthFrame out(depth_gt.width(), depth_gt.height());
  for (const std::size_t i : candidates) out[i] = depth_gt[i];

  if (cfg.dilate) {
    const DepthFrame kept = out;
    const int w = out.width();
    const int h = out.height();
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (kept(r, c) > 0.0 || !in_range(depth_gt(r, c))) continue;
        bool touches = false;
        for (int dr = -1; dr <= 1 && !touches; ++dr) {
          for (int dc = -1; dc <= 1 && !touches; ++dc) {
            touches = kept.InBounds(r + dr, c + dc) && kept(r + dr, c + dc) > 0.0;
          }
        }
        if (touches) out(r, c) = depth_gt(r, c);
      }
    }
  }

  if (cfg.noise) return ApplyNoise(out, cfg.seed, frame_id);
  return out;
}

DepthFrame ApplyNoise(const DepthFrame& depth, std::uint64_t seed,
                      std::uint64_t frame_id) {
  constexpr double kFloor = 0.001;
  DepthFrame out = depth;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double z = out[i];
    if (!(z > 0.0)) continue;
    out[i] = std::max(kFloor, z + NoiseSigma(z) * CounterNormal(seed, frame_id, i));
  }
  return out;
}

}  // namespace augplan
