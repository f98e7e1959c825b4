#pragma once

#include "sclera/detect/types.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace sclera::detect {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Channel holding component `k` (0..4 box/objectness, 5.. classes) of anchor `a`.
inline Index head_channel(const DetectorConfig& cfg, Index anchor, Index k) { return anchor * (5 + cfg.classes) + k; }

/// Turns raw head activations of sample `n` into scored boxes, keeping those
/// whose objectness * class score reaches the confidence threshold. Output
/// order is row-major over cells, then anchor index.
template <typename Scalar>
std::vector<Detection> decode_predictions(const Tensor<Scalar>& raw, const DetectorConfig& cfg, Index n = 0) {
  const Index s = cfg.grid();
  require_shape(raw.shape(), Shape{cfg.head_filters(), s, s}, "detector head");
  const auto value = [&](Index a, Index k, Index row, Index col) {
    return static_cast<double>(raw(n, head_channel(cfg, a, k), row, col));
  };
  std::vector<Detection> out;
  for (Index row = 0; row < s; ++row) {
    for (Index col = 0; col < s; ++col) {
      for (Index a = 0; a < static_cast<Index>(cfg.anchors.size()); ++a) {
        double class_score = 0.0;
        if (cfg.classes == 1) {
          class_score = sigmoid(value(a, 5, row, col));
        } else {
          double zmax = value(a, 5, row, col), denom = 0.0;
          for (Index c = 1; c < cfg.classes; ++c) zmax = std::max(zmax, value(a, 5 + c, row, col));
          for (Index c = 0; c < cfg.classes; ++c) denom += std::exp(value(a, 5 + c, row, col) - zmax);
          class_score = 1.0 / denom;
        }
        const double confidence = sigmoid(value(a, 4, row, col)) * class_score;
        if (confidence < cfg.confidence_threshold) continue;
        Detection d;
        d.row = row;
        d.col = col;
        d.anchor = a;
        d.box.cx = (static_cast<double>(col) + sigmoid(value(a, 0, row, col))) / static_cast<double>(s);
        d.box.cy = (static_cast<double>(row) + sigmoid(value(a, 1, row, col))) / static_cast<double>(s);
        d.box.w = cfg.anchors[a].width * std::exp(value(a, 2, row, col)) / static_cast<double>(s);
        d.box.h = cfg.anchors[a].height * std::exp(value(a, 3, row, col)) / static_cast<double>(s);
        d.box.confidence = confidence;
        out.push_back(d);
      }
    }
  }
  return out;
}

/// Highest-confidence detection; the first one wins exact ties.
std::optional<BoundingBox> select_periocular(const std::vector<Detection>& detections);

/// Regression targets for one ground-truth box: the responsible cell and
/// anchor, the in-cell offsets (sigmoid targets) and log-scale size targets.
struct EncodedBox {
  Index row = 0;
  Index col = 0;
  Index anchor = 0;
  double tx = 0.5;
  double ty = 0.5;
  double tw = 0.0;
  double th = 0.0;
};

/// Picks the cell containing the box centre and the anchor whose shape has
/// the highest IoU with the box (both centred at the origin).
EncodedBox encode_box(const BoundingBox& box, const DetectorConfig& cfg);

}  // namespace sclera::detect
