#pragma once

#include <cstddef>

#include <nlohmann/json_fwd.hpp>

#include "augplan/tsdf.hpp"

namespace augplan {

struct MapComparison {
  double false_pos_rate = 0.0;
  double false_neg_rate = 0.0;
  double coverage = 0.0;
  double rmse_observed = 0.0;

  std::size_t free_gt = 0;
  std::size_t occ_gt = 0;
  std::size_t observed_gt = 0;
  std::size_t observed_both = 0;
  std::size_t false_pos = 0;
  std::size_t false_neg = 0;
};

struct CompareOptions {
  double t = 0.2;
  /// Also count gt-Occupied voxels left Unobserved in the test map as false
  /// negatives.
  bool strict_fn = false;
};

/// Voxel-level comparison of `test` against `gt`. Voxels Unobserved in gt
/// carry no label and are ignored. Throws kAlignmentMismatch.
MapComparison CompareMaps(const TsdfGrid& test, const TsdfGrid& gt,
                          const CompareOptions& options = {});

nlohmann::json ToJson(const MapComparison& cmp);

}  // namespace augplan
