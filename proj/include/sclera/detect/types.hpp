#pragma once

#include "sclera/tensor.hpp"

#include <optional>
#include <vector>

namespace sclera::detect {

/// Prior box shape in grid-cell units.
struct Anchor {
  double width = 1.0;
  double height = 1.0;
};

/// The five priors shipped with the VOC tiny-YOLOv2 configuration.
std::vector<Anchor> voc_anchors();

struct DetectorConfig {
  Index input_size = 416;
  Index input_channels = 3;
  std::vector<Anchor> anchors = voc_anchors();
  Index classes = 1;
  double confidence_threshold = 0.25;
  /// When set, must equal anchors * (5 + classes); a mismatch is a build error.
  std::optional<Index> final_filters;
  /// Divides every hidden layer's filter count; 1 reproduces the full network.
  Index width_divisor = 1;

  Index grid() const { return input_size / 32; }
  Index head_filters() const { return static_cast<Index>(anchors.size()) * (5 + classes); }
  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

/// Normalised centre/size box; coordinates relative to the image in [0,1].
struct BoundingBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 1.0;
  double h = 1.0;
  double confidence = 1.0;

  double x0() const { return cx - w / 2; }
  double y0() const { return cy - h / 2; }
  double x1() const { return cx + w / 2; }
  double y1() const { return cy + h / 2; }
  double area() const { return w * h; }
  /// Intersection with the unit square, re-expressed as centre/size.
  BoundingBox clamped() const;
};

double iou(const BoundingBox& a, const BoundingBox& b);

/// A decoded prediction and the grid slot that produced it.
struct Detection {
  BoundingBox box;
  Index row = 0;
  Index col = 0;
  Index anchor = 0;
};

}  // namespace sclera::detect
