#include "sclera/detect/decode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sclera::detect {

std::vector<Anchor> voc_anchors() { return {{1.08, 1.19}, {3.42, 4.41}, {6.63, 11.38}, {9.42, 5.11}, {16.62, 10.52}}; }

void DetectorConfig::validate() const {
  if (input_size < 32 || input_size % 32 != 0)
    throw std::invalid_argument("detector: input size must be a positive multiple of 32");
  if (input_channels != 1 && input_channels != 3) throw std::invalid_argument("detector: input must have 1 or 3 channels");
  if (anchors.empty()) throw std::invalid_argument("detector: at least one anchor required");
  if (classes < 1) throw std::invalid_argument("detector: at least one class required");
  if (width_divisor < 1) throw std::invalid_argument("detector: width divisor must be >= 1");
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0))
    throw std::invalid_argument("detector: confidence threshold outside [0,1]");
  if (final_filters && *final_filters != head_filters()) {
    throw std::invalid_argument("detector: final layer has " + std::to_string(*final_filters) + " filters but " +
                                std::to_string(anchors.size()) + " anchors x (5 + " + std::to_string(classes) +
                                ") = " + std::to_string(head_filters()));
  }
}

BoundingBox BoundingBox::clamped() const {
  const double l = std::clamp(x0(), 0.0, 1.0), r = std::clamp(x1(), 0.0, 1.0);
  const double t = std::clamp(y0(), 0.0, 1.0), b = std::clamp(y1(), 0.0, 1.0);
  return {(l + r) / 2, (t + b) / 2, r - l, b - t, confidence};
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::max(0.0, std::min(a.x1(), b.x1()) - std::max(a.x0(), b.x0()));
  const double ih = std::max(0.0, std::min(a.y1(), b.y1()) - std::max(a.y0(), b.y0()));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::optional<BoundingBox> select_periocular(const std::vector<Detection>& detections) {
  if (detections.empty()) return std::nullopt;
  const Detection* best = &detections.front();
  for (const auto& d : detections)
    if (d.box.confidence > best->box.confidence) best = &d;
  return best->box;
}

EncodedBox encode_box(const BoundingBox& box, const DetectorConfig& cfg) {
  const double s = static_cast<double>(cfg.grid());
  EncodedBox e;
  e.col = std::clamp<Index>(static_cast<Index>(std::floor(box.cx * s)), 0, cfg.grid() - 1);
  e.row = std::clamp<Index>(static_cast<Index>(std::floor(box.cy * s)), 0, cfg.grid() - 1);
  double best = -1.0;
  for (Index a = 0; a < static_cast<Index>(cfg.anchors.size()); ++a) {
    const BoundingBox prior{0.0, 0.0, cfg.anchors[a].width / s, cfg.anchors[a].height / s, 1.0};
    const double v = iou(prior, BoundingBox{0.0, 0.0, box.w, box.h, 1.0});
    if (v > best) {
      best = v;
      e.anchor = a;
    }
  }
  e.tx = box.cx * s - static_cast<double>(e.col);
  e.ty = box.cy * s - static_cast<double>(e.row);
  e.tw = std::log(box.w * s / cfg.anchors[e.anchor].width);
  e.th = std::log(box.h * s / cfg.anchors[e.anchor].height);
  return e;
}

}  // namespace sclera::detect
