#include "sclera/data/mask.hpp"

#include <opencv2/imgproc.hpp>

#include <stdexcept>

namespace sclera {

BinaryMask BinaryMask::from_mat(const cv::Mat& m) {
  if (m.empty()) throw std::invalid_argument("mask: empty image");
  cv::Mat gray;
  if (m.channels() == 1) gray = m;
  else cv::extractChannel(m, gray, 0);
  if (gray.depth() != CV_8U) gray.convertTo(gray, CV_8U);
  Array px(gray.rows, gray.cols);
  for (int y = 0; y < gray.rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.cols; ++x) px(y, x) = row[x] >= 128;
  }
  return BinaryMask(std::move(px));
}

cv::Mat BinaryMask::to_mat() const {
  cv::Mat m(static_cast<int>(height()), static_cast<int>(width()), CV_8UC1);
  for (int y = 0; y < m.rows; ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) row[x] = pixels_(y, x) ? 255 : 0;
  }
  return m;
}

BinaryMask binarize(const ProbabilityMask& mask, float threshold) {
  if (!(threshold > 0.0f && threshold < 1.0f)) throw std::invalid_argument("binarize: threshold must lie in (0,1)");
  return BinaryMask(BinaryMask::Array(mask.array() >= threshold));
}

}  // namespace sclera
