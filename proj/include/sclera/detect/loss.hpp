#pragma once

#include "sclera/detect/decode.hpp"
#include "sclera/nn/losses.hpp"

namespace sclera::detect {

struct DetectorLossWeights {
  double coord = 5.0;
  double noobj = 0.5;
};

template <typename Scalar>
struct DetectorLoss {
  double coord = 0.0;
  double object = 0.0;
  double no_object = 0.0;
  double cls = 0.0;
  double total = 0.0;
  Tensor<Scalar> grad;
};

/// Sum-of-squares YOLOv2-style loss, summed over predictors and averaged over
/// the batch. Exactly one ground-truth box per sample.
template <typename Scalar>
DetectorLoss<Scalar> detector_loss(const Tensor<Scalar>& raw, const std::vector<BoundingBox>& truth,
                                   const DetectorConfig& cfg, DetectorLossWeights weights = {}) {
  const Index s = cfg.grid();
  require_shape(raw.shape(), Shape{cfg.head_filters(), s, s}, "detector head");
  if (static_cast<Index>(truth.size()) != raw.batch())
    throw std::invalid_argument("detector loss: need exactly one box per sample");
  DetectorLoss<Scalar> out;
  out.grad = Tensor<Scalar>(raw.batch(), raw.shape());
  const double inv_batch = 1.0 / static_cast<double>(raw.batch());
  // d/dz (sigmoid(z) - y)^2 * w
  const auto squared_sigmoid = [&](Index n, Index ch, Index row, Index col, double target, double w) {
    const double p = sigmoid(static_cast<double>(raw(n, ch, row, col)));
    out.grad(n, ch, row, col) += static_cast<Scalar>(inv_batch * w * 2.0 * (p - target) * p * (1.0 - p));
    return w * (p - target) * (p - target);
  };
  const auto squared_linear = [&](Index n, Index ch, Index row, Index col, double target, double w) {
    const double z = static_cast<double>(raw(n, ch, row, col));
    out.grad(n, ch, row, col) += static_cast<Scalar>(inv_batch * w * 2.0 * (z - target));
    return w * (z - target) * (z - target);
  };
  for (Index n = 0; n < raw.batch(); ++n) {
    const EncodedBox e = encode_box(truth[n], cfg);
    for (Index row = 0; row < s; ++row) {
      for (Index col = 0; col < s; ++col) {
        for (Index a = 0; a < static_cast<Index>(cfg.anchors.size()); ++a) {
          const bool responsible = row == e.row && col == e.col && a == e.anchor;
          if (!responsible) {
            out.no_object += squared_sigmoid(n, head_channel(cfg, a, 4), row, col, 0.0, weights.noobj);
            continue;
          }
          out.object += squared_sigmoid(n, head_channel(cfg, a, 4), row, col, 1.0, 1.0);
          out.coord += squared_sigmoid(n, head_channel(cfg, a, 0), row, col, e.tx, weights.coord);
          out.coord += squared_sigmoid(n, head_channel(cfg, a, 1), row, col, e.ty, weights.coord);
          out.coord += squared_linear(n, head_channel(cfg, a, 2), row, col, e.tw, weights.coord);
          out.coord += squared_linear(n, head_channel(cfg, a, 3), row, col, e.th, weights.coord);
          for (Index c = 0; c < cfg.classes; ++c)
            out.cls += squared_sigmoid(n, head_channel(cfg, a, 5 + c), row, col, c == 0 ? 1.0 : 0.0, 1.0);
        }
      }
    }
  }
  out.coord *= inv_batch;
  out.object *= inv_batch;
  out.no_object *= inv_batch;
  out.cls *= inv_batch;
  out.total = out.coord + out.object + out.no_object + out.cls;
  return out;
}

}  // namespace sclera::detect
