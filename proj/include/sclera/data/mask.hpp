#pragma once

#include "sclera/tensor.hpp"

#include <opencv2/core.hpp>

namespace sclera {

/// Per-pixel sclera flag (true = sclera), row-major height x width.
class BinaryMask {
 public:
  using Array = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BinaryMask() = default;
  BinaryMask(Index width, Index height, bool value = false) : pixels_(Array::Constant(height, width, value)) {}
  explicit BinaryMask(Array pixels) : pixels_(std::move(pixels)) {}

  Index width() const { return pixels_.cols(); }
  Index height() const { return pixels_.rows(); }
  Index area() const { return pixels_.size(); }
  Index count() const { return pixels_.count(); }

  bool operator()(Index y, Index x) const { return pixels_(y, x); }
  bool& operator()(Index y, Index x) { return pixels_(y, x); }

  const Array& array() const { return pixels_; }
  Array& array() { return pixels_; }

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.width() == b.width() && a.height() == b.height() && (a.pixels_ == b.pixels_).all();
  }

  /// Any pixel >= 128 in the first channel counts as sclera.
  static BinaryMask from_mat(const cv::Mat& m);
  /// Single-channel 8-bit, 0 background / 255 sclera.
  cv::Mat to_mat() const;

 private:
  Array pixels_;
};

/// Sclera probability per pixel, at network resolution.
class ProbabilityMask {
 public:
  using Array = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  ProbabilityMask() = default;
  ProbabilityMask(Index width, Index height, float value = 0.0f) : values_(Array::Constant(height, width, value)) {}
  explicit ProbabilityMask(Array values) : values_(std::move(values)) {}

  Index width() const { return values_.cols(); }
  Index height() const { return values_.rows(); }
  const Array& array() const { return values_; }
  Array& array() { return values_; }
  float operator()(Index y, Index x) const { return values_(y, x); }

 private:
  Array values_;
};

/// true iff probability >= threshold. Threshold must lie in (0,1).
BinaryMask binarize(const ProbabilityMask& mask, float threshold = 0.5f);

}  // namespace sclera
