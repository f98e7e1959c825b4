#pragma once

#include "sclera/data/geometry.hpp"
#include "sclera/data/mask.hpp"
#include "sclera/seg/fcn8.hpp"
#include "sclera/seg/pix2pix.hpp"
#include "sclera/seg/segnet.hpp"

#include <memory>
#include <mutex>

namespace sclera::seg {

using Kind = data::Approach;

struct SegmenterConfig {
  Kind kind = Kind::FCN;
  /// Network input, width x height; defaults to the approach's native size.
  std::optional<cv::Size> input_size;
  Index width_divisor = 1;
  /// FCN only: width of the first 1x1 layer before division.
  Index fc_channels = 4096;
  std::uint64_t seed = 0;

  cv::Size resolved_input() const { return input_size.value_or(data::input_size_for(kind)); }
};

/// One of the three segmentation networks in single precision. For the GAN
/// the discriminator travels along so a checkpoint captures both halves.
class SegmentationModel : public nn::Module<float> {
 public:
  explicit SegmentationModel(SegmenterConfig cfg);

  const SegmenterConfig& config() const { return cfg_; }
  Kind kind() const { return cfg_.kind; }
  cv::Size input_size() const { return cfg_.resolved_input(); }

  /// The segmenting network: FCN8, SegNet or the U-Net generator.
  nn::Network<float>& network() { return *net_; }
  /// Only for the GAN; throws otherwise.
  PatchDiscriminator<float>& discriminator();

  void visit_parameters(const nn::ParameterVisitor<float>& visit) override;
  nn::ModelSpec describe() const { return net_->describe(); }

  /// Batch of images at input_size() -> network input tensor.
  Tensor<float> to_input(const std::vector<cv::Mat>& images) const;
  /// Sclera probability of sample `n` of a network output.
  ProbabilityMask to_probability(const Tensor<float>& output, Index n = 0) const;

  /// Eval-mode forward of one image already at input_size(). Concurrent
  /// calls are serialized, since layers keep per-call scratch state.
  ProbabilityMask segment(const cv::Mat& image);

 private:
  SegmenterConfig cfg_;
  std::mutex forward_mutex_;
  std::unique_ptr<nn::Network<float>> net_;
  std::unique_ptr<PatchDiscriminator<float>> disc_;
};

/// What the pipeline hands to a segmenter: the crop resized to the network
/// input, and (evaluation only) the equally transformed ground truth.
struct SegmentRequest {
  const cv::Mat& image;
  const BinaryMask* reference = nullptr;
};

/// Common interface of everything the evaluation pipeline can run.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::string name() const = 0;
  virtual cv::Size input_size() const = 0;
  virtual ProbabilityMask segment(const SegmentRequest& request) = 0;
};

class NetworkSegmenter : public Segmenter {
 public:
  explicit NetworkSegmenter(SegmentationModel& model) : model_(model) {}
  std::string name() const override { return data::to_string(model_.kind()); }
  cv::Size input_size() const override { return model_.input_size(); }
  ProbabilityMask segment(const SegmentRequest& request) override { return model_.segment(request.image); }

 private:
  SegmentationModel& model_;
};

/// Returns the reference mask unchanged; exercises the pipeline end to end.
class EchoSegmenter : public Segmenter {
 public:
  explicit EchoSegmenter(cv::Size input) : input_(input) {}
  std::string name() const override { return "echo"; }
  cv::Size input_size() const override { return input_; }
  ProbabilityMask segment(const SegmentRequest& request) override;

 private:
  cv::Size input_;
};

/// Predicts background everywhere.
class BackgroundSegmenter : public Segmenter {
 public:
  explicit BackgroundSegmenter(cv::Size input) : input_(input) {}
  std::string name() const override { return "background"; }
  cv::Size input_size() const override { return input_; }
  ProbabilityMask segment(const SegmentRequest&) override {
    return ProbabilityMask(input_.width, input_.height, 0.0f);
  }

 private:
  cv::Size input_;
};

}  // namespace sclera::seg
