#include "sclera/eval/pipeline.hpp"

#include "sclera/error.hpp"
#include "sclera/log.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cctype>

namespace sclera::eval {

std::string to_string(MetricsResolution r) { return r == MetricsResolution::Original ? "original" : "network"; }

MetricsResolution parse_resolution(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (l == "original") return MetricsResolution::Original;
  if (l == "network") return MetricsResolution::Network;
  throw UsageError("unknown metrics resolution '" + s + "' (expected original or network)");
}

SegmentationPipeline::SegmentationPipeline(detect::PeriocularDetector* detector, seg::Segmenter& segmenter,
                                           PipelineOptions options)
    : detector_(detector), segmenter_(segmenter), options_(options) {
  if (!(options_.threshold > 0.0f && options_.threshold < 1.0f))
    throw UsageError("binarization threshold must lie in (0, 1)");
  if (options_.padding.width <= 0.0 || options_.padding.height <= 0.0)
    throw UsageError("padding factors must be positive");
}

PipelineOutput SegmentationPipeline::run(const cv::Mat& image, const BinaryMask* reference) {
  if (image.empty()) throw std::invalid_argument("pipeline: empty image");
  if (reference && (reference->width() != image.cols || reference->height() != image.rows))
    throw std::invalid_argument("pipeline: reference mask does not match the image size");
  PipelineOutput out;
  std::optional<data::Crop> crop;
  if (detector_) {
    out.detection = detector_->detect(image);
    if (out.detection) crop = data::crop_roi(image, *out.detection, options_.padding);
  }
  if (!crop) {
    out.full_image = true;
    crop = data::full_image_roi(image);
  }
  const cv::Size target = segmenter_.input_size();
  cv::Mat resized;
  if (crop->image.size() == target) resized = crop->image;
  else cv::resize(crop->image, resized, target, 0, 0, cv::INTER_LINEAR);
  crop->transform.resized_to = target;
  out.transform = crop->transform;

  std::optional<BinaryMask> ref_small;
  if (reference) ref_small = data::resize_mask(data::crop_mask(*reference, out.transform), target);
  const ProbabilityMask prob = segmenter_.segment({resized, ref_small ? &*ref_small : nullptr});
  if (prob.width() != target.width || prob.height() != target.height)
    throw std::logic_error("pipeline: segmenter returned a mask of the wrong size");
  out.network_mask = binarize(prob, options_.threshold);
  out.mask = data::map_mask_to_original(out.network_mask, out.transform, image.size());
  return out;
}

EvaluationResult evaluate(SegmentationPipeline& pipeline, const std::vector<data::ImageSample>& samples,
                          const std::string& database, const std::string& approach, const ImageCallback& on_image) {
  EvaluationResult result;
  for (const auto& s : samples) {
    if (!s.mask_path) {
      log_warning("excluding " + s.id + ": no ground-truth mask");
      result.excluded.push_back(s.id);
      continue;
    }
    const cv::Mat image = cv::imread(s.image_path.string(), cv::IMREAD_COLOR);
    const cv::Mat mask = cv::imread(s.mask_path->string(), cv::IMREAD_GRAYSCALE);
    if (image.empty() || mask.empty()) {
      log_warning("excluding " + s.id + ": unreadable image or mask");
      result.excluded.push_back(s.id);
      continue;
    }
    const BinaryMask gt = BinaryMask::from_mat(mask);
    if (gt.width() != image.cols || gt.height() != image.rows) {
      log_warning("excluding " + s.id + ": mask size differs from image");
      result.excluded.push_back(s.id);
      continue;
    }
    const PipelineOutput out = pipeline.run(image, &gt);
    if (out.full_image) log_info(s.id + ": no periocular region detected, segmented the full image");
    PixelCounts c;
    if (pipeline.options().resolution == MetricsResolution::Original) {
      c = pixel_counts(out.mask, gt);
    } else {
      const cv::Size target = out.transform.resized_to;
      c = pixel_counts(out.network_mask, data::resize_mask(data::crop_mask(gt, out.transform), target));
    }
    result.records.push_back(metrics(c, s.id));
    if (on_image) on_image(s, image, out, gt);
  }
  if (result.records.empty() && !samples.empty())
    throw DataError("none of the " + std::to_string(samples.size()) + " samples could be evaluated");
  result.row = aggregate(result.records, database, approach);
  return result;
}

void require_disjoint(const std::set<data::SensorTag>& train_db, const std::set<data::SensorTag>& test_db) {
  if (train_db.empty() || test_db.empty()) throw UsageError("cross-sensor evaluation needs two non-empty databases");
  for (auto t : train_db)
    if (test_db.count(t))
      throw UsageError("cross-sensor evaluation refuses overlapping databases (" + data::database_label(train_db) +
                       " vs " + data::database_label(test_db) + " share " + data::to_string(t) + ")");
}

EvaluationResult cross_sensor_evaluate(SegmentationPipeline& pipeline, const data::Manifest& manifest,
                                       const data::SplitAssignment& split, const std::set<data::SensorTag>& train_db,
                                       const std::set<data::SensorTag>& test_db, const std::string& approach,
                                       const ImageCallback& on_image) {
  require_disjoint(train_db, test_db);
  std::vector<data::ImageSample> test;
  for (const auto& s : data::select(manifest, split, data::Subset::Test))
    if (test_db.count(s.sensor)) test.push_back(s);
  if (test.empty()) throw DataError("cross-sensor evaluation: no test images for " + data::database_label(test_db));
  return evaluate(pipeline, test, data::database_label(train_db) + " -> " + data::database_label(test_db), approach,
                  on_image);
}

}  // namespace sclera::eval
