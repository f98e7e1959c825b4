#include "sclera/detect/detector.hpp"

#include "sclera/data/tensor_io.hpp"

#include <opencv2/imgproc.hpp>

namespace sclera::detect {

Tensor<float> PeriocularDetector::to_input(const std::vector<cv::Mat>& images) const {
  const int side = static_cast<int>(config().input_size);
  std::vector<cv::Mat> resized;
  resized.reserve(images.size());
  for (const auto& im : images) {
    if (im.empty()) throw std::invalid_argument("detector: empty image");
    if (im.cols == side && im.rows == side) {
      resized.push_back(im);
    } else {
      cv::Mat r;
      cv::resize(im, r, cv::Size(side, side), 0, 0, cv::INTER_LINEAR);
      resized.push_back(r);
    }
  }
  return data::images_to_tensor(resized, config().input_channels);
}

std::vector<Detection> PeriocularDetector::detections(const cv::Mat& image) {
  const Tensor<float> input = to_input({image});
  std::lock_guard lock(forward_mutex_);
  const Tensor<float> raw = net_.forward(input, nn::Mode::Eval);
  return decode_predictions(raw, config(), 0);
}

}  // namespace sclera::detect
