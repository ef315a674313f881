#include "augplan/complete.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "augplan/frame_io.hpp"

namespace augplan {

CompleterSpec CompleterSpec::Parse(const std::string& text) {
  CompleterSpec spec;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string params =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);
  if (name == "passthrough") {
    spec.kind = CompleterKind::kPassthrough;
  } else if (name == "nearest" || name == "nearest_valid") {
    spec.kind = CompleterKind::kNearestValid;
  } else if (name == "idw") {
    spec.kind = CompleterKind::kIdw;
  } else if (name == "external" || name == "external_file") {
    spec.kind = CompleterKind::kExternalFile;
  } else {
    throw Error(ErrorCode::kValidation, "unknown completer '" + name + "'");
  }

  std::stringstream ss(params);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kValidation,
                  "completer parameter '" + item + "' needs key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "k" && spec.kind == CompleterKind::kIdw) {
        spec.k = std::stoi(value);
      } else if ((key == "pow" || key == "power") &&
                 spec.kind == CompleterKind::kIdw) {
        spec.power = std::stod(value);
      } else if (key == "path" && spec.kind == CompleterKind::kExternalFile) {
        spec.path_pattern = value;
      } else {
        throw Error(ErrorCode::kValidation, "unknown completer parameter '" +
                                                key + "' for " + name);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kValidation,
                  "bad value for completer parameter '" + key + "'");
    }
  }
  spec.Validate();
  return spec;
}

std::string CompleterSpec::ToString() const {
  switch (kind) {
    case CompleterKind::kPassthrough:
      return "passthrough";
    case CompleterKind::kNearestValid:
      return "nearest";
    case CompleterKind::kIdw: {
      std::ostringstream os;
      os << "idw:k=" << k << ",pow=" << power;
      return os.str();
    }
    case CompleterKind::kExternalFile:
      return "external:path=" + path_pattern;
  }
  return "";
}

void CompleterSpec::Validate() const {
  if (kind == CompleterKind::kIdw && (k < 1 || !(power > 0.0))) {
    throw Error(ErrorCode::kValidation, "idw requires k >= 1 and power > 0");
  }
  if (kind == CompleterKind::kExternalFile && path_pattern.empty()) {
    throw Error(ErrorCode::kValidation, "external completer needs a path");
  }
}

AugmentedFrame MergeMeasured(const DepthFrame& prediction,
                             const DepthFrame& sparse) {
  if (!prediction.SameShape(sparse)) {
    throw Error(ErrorCode::kResolutionMismatch,
                "prediction and sparse frames differ in resolution");
  }
  AugmentedFrame out{DepthFrame(sparse.width(), sparse.height()),
                     ProvenanceMask(sparse.width(), sparse.height())};
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (sparse[i] > 0.0) {
      out.depth[i] = sparse[i];
      out.provenance[i] = Provenance::kMeasured;
    } else if (prediction[i] > 0.0) {
      out.depth[i] = prediction[i];
      out.provenance[i] = Provenance::kPredicted;
    }
  }
  return out;
}

ValidPixelIndex::ValidPixelIndex(const DepthFrame& sparse, int cell)
    : width_(sparse.width()),
      height_(sparse.height()),
      cell_(cell),
      cells_x_((sparse.width() + cell - 1) / cell),
      cells_y_((sparse.height() + cell - 1) / cell) {
  const std::size_t n_cells =
      static_cast<std::size_t>(cells_x_) * static_cast<std::size_t>(cells_y_);
  std::vector<std::size_t> counts(n_cells + 1, 0);
  auto cell_of = [&](std::size_t i) {
    const int r = static_cast<int>(i / width_);
    const int c = static_cast<int>(i % width_);
    return static_cast<std::size_t>(r / cell_) * cells_x_ + c / cell_;
  };
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (sparse[i] > 0.0) {
      ++counts[cell_of(i) + 1];
      ++count_;
    }
  }
  for (std::size_t k = 1; k <= n_cells; ++k) counts[k] += counts[k - 1];
  cell_start_ = counts;
  items_.resize(count_);
  std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (sparse[i] > 0.0) items_[fill[cell_of(i)]++] = i;
  }
}

void ValidPixelIndex::Nearest(int row, int col, int k,
                              std::vector<Neighbor>& out) const {
  out.clear();
  if (count_ == 0 || k <= 0) return;
  const int cr = row / cell_;
  const int cc = col / cell_;
  const int max_ring = std::max(cells_x_, cells_y_);
  auto better = [](const Neighbor& a, const Neighbor& b) {
    return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.index < b.index;
  };
  auto visit_cell = [&](int y, int x) {
    if (x < 0 || y < 0 || x >= cells_x_ || y >= cells_y_) return;
    const std::size_t id = static_cast<std::size_t>(y) * cells_x_ + x;
    for (std::size_t s = cell_start_[id]; s < cell_start_[id + 1]; ++s) {
      const std::size_t i = items_[s];
      const long dr = static_cast<long>(i / width_) - row;
      const long dc = static_cast<long>(i % width_) - col;
      const Neighbor n{i, dr * dr + dc * dc};
      if (static_cast<int>(out.size()) < k) {
        out.insert(std::upper_bound(out.begin(), out.end(), n, better), n);
      } else if (better(n, out.back())) {
        out.pop_back();
        out.insert(std::upper_bound(out.begin(), out.end(), n, better), n);
      }
    }
  };
  for (int ring = 0; ring <= max_ring; ++ring) {
    if (static_cast<int>(out.size()) == k && ring > 0) {
      // Any pixel in this ring is at least (ring - 1) * cell + 1 away along
      // one axis.
      const long bound = static_cast<long>(ring - 1) * cell_ + 1;
      if (out.back().dist2 < bound * bound) break;
    }
    if (ring == 0) {
      visit_cell(cr, cc);
      continue;
    }
    for (int x = cc - ring; x <= cc + ring; ++x) {
      visit_cell(cr - ring, x);
      visit_cell(cr + ring, x);
    }
    for (int y = cr - ring + 1; y <= cr + ring - 1; ++y) {
      visit_cell(y, cc - ring);
      visit_cell(y, cc + ring);
    }
  }
}

namespace {

DepthFrame PredictByNeighbors(const DepthFrame& sparse, int k, double power,
                              bool nearest_only) {
  const ValidPixelIndex index(sparse);
  if (index.size() == 0) {
    throw Error(ErrorCode::kNoSupport,
                "frame has no valid pixels to complete from");
  }
  DepthFrame pred(sparse.width(), sparse.height());
  std::vector<ValidPixelIndex::Neighbor> neighbors;
  for (int r = 0; r < sparse.height(); ++r) {
    for (int c = 0; c < sparse.width(); ++c) {
      if (sparse(r, c) > 0.0) continue;
      index.Nearest(r, c, nearest_only ? 1 : k, neighbors);
      if (nearest_only) {
        pred(r, c) = sparse[neighbors.front().index];
        continue;
      }
      double num = 0.0;
      double den = 0.0;
      for (const auto& n : neighbors) {
        const double w =
            1.0 / std::pow(static_cast<double>(n.dist2), 0.5 * power);
        num += w * sparse[n.index];
        den += w;
      }
      pred(r, c) = num / den;
    }
  }
  return pred;
}

std::string ExpandPattern(const std::string& pattern, std::size_t frame) {
  std::string out = pattern;
  const std::string token = "{frame}";
  for (auto pos = out.find(token); pos != std::string::npos;
       pos = out.find(token)) {
    out.replace(pos, token.size(), std::to_string(frame));
  }
  return out;
}

}  // namespace

AugmentedFrame Complete(const CompleterSpec& spec, const GrayFrame& gray,
                        const DepthFrame& sparse, std::size_t frame_index) {
  spec.Validate();
  if (!gray.SameShape(sparse)) {
    throw Error(ErrorCode::kResolutionMismatch,
                "gray and sparse frames differ in resolution");
  }
  switch (spec.kind) {
    case CompleterKind::kPassthrough:
      return MergeMeasured(DepthFrame(sparse.width(), sparse.height()), sparse);
    case CompleterKind::kNearestValid:
      return MergeMeasured(PredictByNeighbors(sparse, 1, 1.0, true), sparse);
    case CompleterKind::kIdw:
      return MergeMeasured(PredictByNeighbors(sparse, spec.k, spec.power, false),
                           sparse);
    case CompleterKind::kExternalFile: {
      const std::filesystem::path path =
          ExpandPattern(spec.path_pattern, frame_index);
      if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::kMissingPrediction,
                    "prediction file not found: " + path.string());
      }
      DepthFrame prediction = ReadDepth(path);
      if (!prediction.SameShape(sparse)) {
        throw Error(ErrorCode::kResolutionMismatch,
                    "prediction " + path.string() +
                        " does not match the sparse frame resolution");
      }
      return MergeMeasured(prediction, sparse);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unhandled completer kind");
}

ValidityMask EvaluationMask(const DepthFrame& gt, const DepthFrame& sparse,
                            EvalMaskSource source) {
  if (!gt.SameShape(sparse)) {
    throw Error(ErrorCode::kResolutionMismatch,
                "ground truth and sparse frames differ in resolution");
  }
  ValidityMask mask(gt.width(), gt.height(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool measured = sparse[i] > 0.0;
    const bool wanted =
        source == EvalMaskSource::kPredictedPixels ? !measured : measured;
    mask[i] = wanted && gt[i] > 0.0 ? 1 : 0;
  }
  return mask;
}

double MaskedL1(const DepthFrame& pred, const DepthFrame& gt,
                const DepthFrame& sparse, EvalMaskSource source) {
  if (!pred.SameShape(gt)) {
    throw Error(ErrorCode::kResolutionMismatch,
                "prediction and ground truth differ in resolution");
  }
  const ValidityMask mask = EvaluationMask(gt, sparse, source);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    sum += std::abs(pred[i] - gt[i]);
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::kEmptyMask, "evaluation mask is empty");
  return sum / static_cast<double>(n);
}

DepthMetrics ComputeDepthMetrics(const DepthFrame& pred, const DepthFrame& gt,
                                 const ValidityMask& eval_mask) {
  if (!pred.SameShape(gt) || !gt.SameShape(eval_mask)) {
    throw Error(ErrorCode::kResolutionMismatch,
                "prediction, ground truth and mask differ in resolution");
  }
  DepthMetrics m;
  double sq = 0.0;
  double rel = 0.0;
  std::size_t within = 0;
  for (std::size_t i = 0; i < eval_mask.size(); ++i) {
    if (!eval_mask[i]) continue;
    ++m.pixel_count;
    const double err = pred[i] - gt[i];
    sq += err * err;
    if (gt[i] > 0.0) {
      rel += std::abs(err) / gt[i];
    } else {
      ++m.zero_gt_count;
    }
    if (pred[i] >= 0.75 * gt[i] && pred[i] <= 1.25 * gt[i]) ++within;
  }
  if (m.pixel_count == 0) {
    throw Error(ErrorCode::kEmptyMask, "evaluation mask is empty");
  }
  const auto n = static_cast<double>(m.pixel_count);
  m.rmse = std::sqrt(sq / n);
  const std::size_t rel_count = m.pixel_count - m.zero_gt_count;
  m.rel = rel_count > 0 ? rel / static_cast<double>(rel_count) : 0.0;
  m.delta = static_cast<double>(within) / n;
  return m;
}

}  // namespace augplan
