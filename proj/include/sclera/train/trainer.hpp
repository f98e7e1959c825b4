#pragma once

#include "sclera/data/split.hpp"
#include "sclera/detect/detector.hpp"
#include "sclera/nn/losses.hpp"
#include "sclera/seg/segmenter.hpp"
#include "sclera/train/checkpoint.hpp"

#include <functional>

namespace sclera::train {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 4;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  /// GAN only: weight of the L1 reconstruction term.
  double lambda_l1 = 100.0;
  /// Where best.ckpt and train_log.jsonl go; empty keeps everything in memory.
  fs::path checkpoint_dir;
  /// Validation metric: f_score, precision or recall for segmenters, iou for the detector.
  std::string select_on = "f_score";
  /// Global gradient-norm cap; <= 0 disables clipping.
  double clip_norm = 10.0;
  /// Cross-entropy weight of the sclera class (background weighs 1).
  double sclera_weight = 1.0;
  float threshold = 0.5f;
  /// Ends training early once the validation score reaches this value.
  std::optional<double> stop_at;

  /// Throws UsageError on out-of-range values.
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_score = 0.0;
  double seconds = 0.0;
  /// GAN only: mean discriminator loss.
  std::optional<double> discriminator_loss;
};

/// One record per completed epoch; serialised as one JSON object per line.
struct TrainLog {
  std::string metric;
  std::vector<EpochRecord> epochs;

  std::string to_jsonl() const;
  static std::string record_line(const EpochRecord& r, const std::string& metric);
};

struct TrainResult {
  TrainLog log;
  int best_epoch = 0;
  double best_score = 0.0;
  std::optional<fs::path> checkpoint;
};

/// An image already at network resolution with its mask.
struct SegmentationExample {
  std::string id;
  cv::Mat image;
  BinaryMask mask;
};

/// A full image with its normalised periocular box.
struct DetectionExample {
  std::string id;
  cv::Mat image;
  detect::BoundingBox box;
};

/// Called after every epoch; handy for progress output.
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mean per-pixel two-class cross-entropy of N x 2 x H x W logits against masks.
nn::LossResult<float> segmentation_loss(const Tensor<float>& logits, const std::vector<BinaryMask>& gt,
                                        double sclera_weight = 1.0);

/// Mean validation metric (`select_on`) of `model` over `examples`.
double validate_segmenter(seg::SegmentationModel& model, const std::vector<SegmentationExample>& examples,
                          const std::string& select_on, float threshold);
/// Mean IoU between the selected detection (0 when none) and the ground truth.
double validate_detector(detect::PeriocularDetector& detector, const std::vector<DetectionExample>& examples);

/// Trains for cfg.epochs, validating after each. On return the model holds
/// the weights of the best epoch, which are also written to
/// checkpoint_dir/best.ckpt when a directory is configured. Empty sets throw
/// DataError; a non-finite loss throws NumericalError.
TrainResult train_segmenter(seg::SegmentationModel& model, const TrainConfig& cfg,
                            const std::vector<SegmentationExample>& train, const std::vector<SegmentationExample>& val,
                            const json& metadata = json::object(), const EpochCallback& on_epoch = {});
TrainResult train_detector(detect::PeriocularDetector& detector, const TrainConfig& cfg,
                           const std::vector<DetectionExample>& train, const std::vector<DetectionExample>& val,
                           const json& metadata = json::object(), const EpochCallback& on_epoch = {});

/// Pixel boxes `id x y width height` (top-left corner), one per line, `#` comments.
std::map<std::string, cv::Rect2d> read_box_annotations(const fs::path& path);
detect::BoundingBox normalize_box(const cv::Rect2d& box, cv::Size image);

/// Reads images and masks of `samples` and brings them to `input`. When
/// `boxes` is given, each image is first cropped to its padded box, the
/// region the segmenter sees at inference. Samples without a mask throw DataError.
std::vector<SegmentationExample> load_segmentation_examples(const std::vector<data::ImageSample>& samples,
                                                            cv::Size input,
                                                            const std::map<std::string, cv::Rect2d>* boxes = nullptr,
                                                            const data::PaddingPolicy& padding = {});
/// Samples without a box throw DataError.
std::vector<DetectionExample> load_detection_examples(const std::vector<data::ImageSample>& samples,
                                                      const std::map<std::string, cv::Rect2d>& boxes);

}  // namespace sclera::train
