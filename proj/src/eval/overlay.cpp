#include "sclera/eval/overlay.hpp"

#include <opencv2/imgproc.hpp>

#include <stdexcept>

namespace sclera::eval {

cv::Mat render_error_overlay(const BinaryMask& pred, const BinaryMask& gt, const cv::Mat& base) {
  if (pred.width() != gt.width() || pred.height() != gt.height() || base.cols != pred.width() ||
      base.rows != pred.height())
    throw std::invalid_argument("overlay: prediction, ground truth and image must have the same size");
  cv::Mat out;
  if (base.type() == CV_8UC3) out = base.clone();
  else if (base.type() == CV_8UC1) cv::cvtColor(base, out, cv::COLOR_GRAY2BGR);
  else throw std::invalid_argument("overlay: base image must be 8-bit gray or BGR");
  for (int y = 0; y < out.rows; ++y) {
    auto* row = out.ptr<cv::Vec3b>(y);
    for (int x = 0; x < out.cols; ++x) {
      const bool p = pred(y, x), g = gt(y, x);
      if (p && !g) row[x] = kFalsePositiveColor;
      else if (!p && g) row[x] = kFalseNegativeColor;
    }
  }
  return out;
}

}  // namespace sclera::eval
