#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "augplan/frames.hpp"

namespace augplan {

/// Dense depth plus where each value came from.
struct AugmentedFrame {
  DepthFrame depth;
  ProvenanceMask provenance;
};

enum class CompleterKind { kPassthrough, kNearestValid, kIdw, kExternalFile };

struct CompleterSpec {
  CompleterKind kind = CompleterKind::kIdw;
  int k = 4;
  double power = 2.0;
  /// DFRM path for kExternalFile; "{frame}" is replaced by the frame index.
  std::string path_pattern;

  /// "passthrough", "nearest", "idw:k=4,pow=2", "external:path=pred_{frame}.dfrm".
  static CompleterSpec Parse(const std::string& text);
  std::string ToString() const;
  void Validate() const;
  bool operator==(const CompleterSpec&) const = default;
};

/// Measured-overrides-predicted merge: valid sparse pixels are copied and
/// labelled Measured; every other pixel takes the prediction (Predicted when
/// > 0, Invalid otherwise).
AugmentedFrame MergeMeasured(const DepthFrame& prediction,
                             const DepthFrame& sparse);

/// Runs the completer and applies the merge rule.
AugmentedFrame Complete(const CompleterSpec& spec, const GrayFrame& gray,
                        const DepthFrame& sparse, std::size_t frame_index = 0);

/// Exact k-nearest valid pixels by Euclidean pixel distance, ties to the
/// smaller row-major index. Backed by a uniform bucket grid.
class ValidPixelIndex {
 public:
  explicit ValidPixelIndex(const DepthFrame& sparse, int cell = 8);

  struct Neighbor {
    std::size_t index;
    long dist2;
  };

  /// Up to k neighbors sorted by (dist2, index).
  void Nearest(int row, int col, int k, std::vector<Neighbor>& out) const;
  std::size_t size() const { return count_; }

 private:
  int width_;
  int height_;
  int cell_;
  int cells_x_;
  int cells_y_;
  std::size_t count_ = 0;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> items_;
};

/// Which pixels a loss or metric is evaluated on.
enum class EvalMaskSource {
  /// Invalid in the sparse input and valid in ground truth (default).
  kPredictedPixels,
  /// Valid in the sparse input (the formula's literal mask), still
  /// restricted to valid ground truth.
  kMeasuredPixels,
};

ValidityMask EvaluationMask(const DepthFrame& gt, const DepthFrame& sparse,
                            EvalMaskSource source =
                                EvalMaskSource::kPredictedPixels);

/// Mean |pred - gt| over the evaluation mask. Throws kEmptyMask.
double MaskedL1(const DepthFrame& pred, const DepthFrame& gt,
                const DepthFrame& sparse,
                EvalMaskSource source = EvalMaskSource::kPredictedPixels);

struct DepthMetrics {
  double rmse = 0.0;
  double rel = 0.0;
  /// Fraction with pred in [0.75 gt, 1.25 gt].
  double delta = 0.0;
  std::size_t pixel_count = 0;
  /// Mask pixels with gt == 0, left out of rel.
  std::size_t zero_gt_count = 0;
};

DepthMetrics ComputeDepthMetrics(const DepthFrame& pred, const DepthFrame& gt,
                                 const ValidityMask& eval_mask);

}  // namespace augplan
