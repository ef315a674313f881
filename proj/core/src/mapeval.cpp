#include "augplan/mapeval.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace augplan {

MapComparison CompareMaps(const TsdfGrid& test, const TsdfGrid& gt,
                          const CompareOptions& options) {
  if (!(test.geometry() == gt.geometry())) {
    throw Error(ErrorCode::kAlignmentMismatch,
                "maps differ in origin, voxel size or dims");
  }
  if (!(options.t >= 0.0)) {
    throw Error(ErrorCode::kValidation, "t must be >= 0");
  }
  MapComparison m;
  double sum = 0.0;
  double carry = 0.0;
  const std::size_t n = gt.geometry().VoxelCount();
  for (std::size_t i = 0; i < n; ++i) {
    const VoxelClass g = gt.Classify(i, options.t);
    if (g == VoxelClass::kUnobserved) continue;
    ++m.observed_gt;
    const VoxelClass c = test.Classify(i, options.t);
    if (g == VoxelClass::kFree) {
      ++m.free_gt;
      if (c != VoxelClass::kFree) ++m.false_pos;
    } else {
      ++m.occ_gt;
      if (c == VoxelClass::kFree ||
          (options.strict_fn && c == VoxelClass::kUnobserved)) {
        ++m.false_neg;
      }
    }
    if (c != VoxelClass::kUnobserved) {
      ++m.observed_both;
      const double e = test.distance(i) - gt.distance(i);
      const double y = e * e - carry;
      const double t = sum + y;
      carry = (t - sum) - y;
      sum = t;
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  m.false_pos_rate = ratio(m.false_pos, m.free_gt);
  m.false_neg_rate = ratio(m.false_neg, m.occ_gt);
  m.coverage = ratio(m.observed_both, m.observed_gt);
  m.rmse_observed =
      m.observed_both == 0 ? 0.0 : std::sqrt(sum / m.observed_both);
  return m;
}

nlohmann::json ToJson(const MapComparison& cmp) {
  return {
      {"false_pos_rate", cmp.false_pos_rate},
      {"false_neg_rate", cmp.false_neg_rate},
      {"coverage", cmp.coverage},
      {"rmse_observed", cmp.rmse_observed},
      {"counts",
       {{"free_gt", cmp.free_gt},
        {"occ_gt", cmp.occ_gt},
        {"observed_gt", cmp.observed_gt},
        {"observed_both", cmp.observed_both},
        {"false_pos", cmp.false_pos},
        {"false_neg", cmp.false_neg}}},
  };
}

}  // namespace augplan
