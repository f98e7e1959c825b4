#pragma once

#include "sclera/data/mask.hpp"

#include <opencv2/core.hpp>

namespace sclera::eval {

/// BGR colours of the error classes.
inline const cv::Vec3b kFalsePositiveColor{0, 255, 0};  // green
inline const cv::Vec3b kFalseNegativeColor{0, 0, 255};  // red

/// Copy of `base` (8-bit BGR or gray) with false positives painted green and
/// false negatives red; correct pixels keep their original colour.
cv::Mat render_error_overlay(const BinaryMask& pred, const BinaryMask& gt, const cv::Mat& base);

}  // namespace sclera::eval
