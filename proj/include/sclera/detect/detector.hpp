#pragma once

#include "sclera/detect/decode.hpp"
#include "sclera/detect/fast_yolo.hpp"

#include <opencv2/core.hpp>

#include <mutex>

namespace sclera::detect {

/// Fast-YOLO plus its input conversion and the single-region selection rule.
class PeriocularDetector : public nn::Module<float> {
 public:
  explicit PeriocularDetector(DetectorConfig cfg, std::uint64_t seed = 0) : net_(std::move(cfg), seed) {}

  const DetectorConfig& config() const { return net_.config(); }
  FastYolo<float>& network() { return net_; }

  /// Images of any size, stretched to the square network input.
  Tensor<float> to_input(const std::vector<cv::Mat>& images) const;

  /// Every prediction above the confidence threshold, in image-relative
  /// coordinates. Safe to call from several threads; calls are serialized.
  std::vector<Detection> detections(const cv::Mat& image);
  /// The most confident prediction, or nullopt when none passes the threshold.
  std::optional<BoundingBox> detect(const cv::Mat& image) { return select_periocular(detections(image)); }

  void visit_parameters(const nn::ParameterVisitor<float>& visit) override { net_.visit_parameters(visit); }

 private:
  FastYolo<float> net_;
  std::mutex forward_mutex_;
};

}  // namespace sclera::detect
