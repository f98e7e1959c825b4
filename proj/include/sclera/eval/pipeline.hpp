#pragma once

#include "sclera/data/split.hpp"
#include "sclera/detect/detector.hpp"
#include "sclera/eval/report.hpp"
#include "sclera/seg/segmenter.hpp"

#include <functional>

namespace sclera::eval {

/// Where predictions are compared with the ground truth.
enum class MetricsResolution {
  Original,  // prediction mapped back into the full image
  Network,   // ground truth cropped and resized to the network input
};

std::string to_string(MetricsResolution r);
MetricsResolution parse_resolution(const std::string& s);

struct PipelineOptions {
  data::PaddingPolicy padding;
  float threshold = 0.5f;
  MetricsResolution resolution = MetricsResolution::Original;
};

struct PipelineOutput {
  BinaryMask mask;          // original image resolution
  BinaryMask network_mask;  // segmenter input resolution
  std::optional<detect::BoundingBox> detection;
  data::RoiTransform transform;
  /// True when no region was detected and the whole image was segmented.
  bool full_image = false;
};

/// detect -> select -> crop with padding -> resize -> segment -> binarize -> map back.
class SegmentationPipeline {
 public:
  /// `detector` may be null, in which case every image is segmented whole.
  SegmentationPipeline(detect::PeriocularDetector* detector, seg::Segmenter& segmenter, PipelineOptions options = {});

  const PipelineOptions& options() const { return options_; }
  seg::Segmenter& segmenter() { return segmenter_; }

  /// `reference` is the full-resolution ground truth; it is cropped and
  /// resized alongside the image and handed to the segmenter.
  PipelineOutput run(const cv::Mat& image, const BinaryMask* reference = nullptr);

 private:
  detect::PeriocularDetector* detector_;
  seg::Segmenter& segmenter_;
  PipelineOptions options_;
};

struct EvaluationResult {
  std::vector<MetricsRecord> records;
  ReportRow row;
  /// Samples skipped for a missing or unreadable image or mask.
  std::vector<std::string> excluded;
};

/// Sees every evaluated image with its pipeline output and ground truth.
using ImageCallback = std::function<void(const data::ImageSample& sample, const cv::Mat& image,
                                         const PipelineOutput& out, const BinaryMask& gt)>;

/// Runs the pipeline over `samples` and aggregates per-image metrics.
EvaluationResult evaluate(SegmentationPipeline& pipeline, const std::vector<data::ImageSample>& samples,
                          const std::string& database, const std::string& approach,
                          const ImageCallback& on_image = {});

/// Throws UsageError when the two databases share a sensor.
void require_disjoint(const std::set<data::SensorTag>& train_db, const std::set<data::SensorTag>& test_db);

/// Evaluates on the test split of `test_db` a model trained on `train_db`.
/// The row's database label reads "TRAIN -> TEST".
EvaluationResult cross_sensor_evaluate(SegmentationPipeline& pipeline, const data::Manifest& manifest,
                                       const data::SplitAssignment& split, const std::set<data::SensorTag>& train_db,
                                       const std::set<data::SensorTag>& test_db, const std::string& approach,
                                       const ImageCallback& on_image = {});

}  // namespace sclera::eval
