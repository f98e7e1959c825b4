#include "sclera/data/tensor_io.hpp"

#include <opencv2/imgproc.hpp>

#include <stdexcept>

namespace sclera::data {

Tensor<float> images_to_tensor(const std::vector<cv::Mat>& images, Index channels) {
  if (images.empty()) throw std::invalid_argument("images_to_tensor: no images");
  const cv::Size size = images.front().size();
  Tensor<float> t(static_cast<Index>(images.size()), {channels, size.height, size.width});
  for (size_t n = 0; n < images.size(); ++n) {
    const cv::Mat& src = images[n];
    if (src.size() != size) throw std::invalid_argument("images_to_tensor: images differ in size");
    cv::Mat converted;
    if (channels == 3) {
      if (src.channels() == 3) cv::cvtColor(src, converted, cv::COLOR_BGR2RGB);
      else cv::cvtColor(src, converted, cv::COLOR_GRAY2RGB);
    } else if (channels == 1) {
      if (src.channels() == 3) cv::cvtColor(src, converted, cv::COLOR_BGR2GRAY);
      else converted = src;
    } else {
      throw std::invalid_argument("images_to_tensor: channels must be 1 or 3");
    }
    for (int y = 0; y < size.height; ++y) {
      const auto* row = converted.ptr<std::uint8_t>(y);
      for (int x = 0; x < size.width; ++x)
        for (Index c = 0; c < channels; ++c)
          t(static_cast<Index>(n), c, y, x) = static_cast<float>(row[x * channels + c]) / 127.5f - 1.0f;
    }
  }
  return t;
}

Tensor<float> masks_to_labels(const std::vector<BinaryMask>& masks) {
  if (masks.empty()) throw std::invalid_argument("masks_to_labels: no masks");
  Tensor<float> t(static_cast<Index>(masks.size()), {1, masks.front().height(), masks.front().width()});
  for (size_t n = 0; n < masks.size(); ++n) {
    if (masks[n].width() != t.width() || masks[n].height() != t.height())
      throw std::invalid_argument("masks_to_labels: masks differ in size");
    for (Index y = 0; y < t.height(); ++y)
      for (Index x = 0; x < t.width(); ++x) t(static_cast<Index>(n), 0, y, x) = masks[n](y, x) ? 1.0f : 0.0f;
  }
  return t;
}

Tensor<float> masks_to_signed(const std::vector<BinaryMask>& masks, Index channels) {
  if (masks.empty()) throw std::invalid_argument("masks_to_signed: no masks");
  Tensor<float> t(static_cast<Index>(masks.size()), {channels, masks.front().height(), masks.front().width()});
  for (size_t n = 0; n < masks.size(); ++n)
    for (Index c = 0; c < channels; ++c)
      for (Index y = 0; y < t.height(); ++y)
        for (Index x = 0; x < t.width(); ++x) t(static_cast<Index>(n), c, y, x) = masks[n](y, x) ? 1.0f : -1.0f;
  return t;
}

}  // namespace sclera::data
