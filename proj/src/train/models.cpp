#include "sclera/train/models.hpp"

#include "sclera/error.hpp"

namespace sclera::train {

json to_json(const detect::DetectorConfig& cfg) {
  json anchors = json::array();
  for (const auto& a : cfg.anchors) anchors.push_back({a.width, a.height});
  json j{{"input_size", cfg.input_size},
         {"input_channels", cfg.input_channels},
         {"anchors", anchors},
         {"classes", cfg.classes},
         {"confidence_threshold", cfg.confidence_threshold},
         {"width_divisor", cfg.width_divisor}};
  return j;
}

detect::DetectorConfig detector_config_from_json(const json& j) {
  detect::DetectorConfig cfg;
  cfg.input_size = j.at("input_size").get<Index>();
  cfg.input_channels = j.at("input_channels").get<Index>();
  cfg.anchors.clear();
  for (const auto& a : j.at("anchors")) cfg.anchors.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  cfg.classes = j.at("classes").get<Index>();
  cfg.confidence_threshold = j.at("confidence_threshold").get<double>();
  cfg.width_divisor = j.at("width_divisor").get<Index>();
  return cfg;
}

json to_json(const seg::SegmenterConfig& cfg) {
  const cv::Size input = cfg.resolved_input();
  return {{"kind", checkpoint_kind(cfg.kind)},     {"input_width", input.width}, {"input_height", input.height},
          {"width_divisor", cfg.width_divisor}, {"fc_channels", cfg.fc_channels}, {"seed", cfg.seed}};
}

seg::SegmenterConfig segmenter_config_from_json(const json& j) {
  seg::SegmenterConfig cfg;
  cfg.kind = data::parse_approach(j.at("kind").get<std::string>());
  cfg.input_size = cv::Size(j.at("input_width").get<int>(), j.at("input_height").get<int>());
  cfg.width_divisor = j.at("width_divisor").get<Index>();
  cfg.fc_channels = j.at("fc_channels").get<Index>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

std::string checkpoint_kind(seg::Kind kind) {
  switch (kind) {
    case seg::Kind::FCN: return "fcn";
    case seg::Kind::SEGNET: return "segnet";
    case seg::Kind::GAN: return "gan";
  }
  return "?";
}

void save_detector(const fs::path& path, detect::PeriocularDetector& detector, const json& metadata) {
  CheckpointHeader h{kDetectorKind, to_json(detector.config()), metadata,
                     nn::format_model_spec(detector.network().describe())};
  save_checkpoint(path, h, detector);
}

void save_segmenter(const fs::path& path, seg::SegmentationModel& model, const json& metadata) {
  CheckpointHeader h{checkpoint_kind(model.kind()), to_json(model.config()), metadata,
                     nn::format_model_spec(model.describe())};
  save_checkpoint(path, h, model);
}

std::unique_ptr<detect::PeriocularDetector> load_detector(const fs::path& path, CheckpointHeader* header) {
  CheckpointHeader h = read_checkpoint_header(path);
  if (h.kind != kDetectorKind)
    throw DataError(path.string() + " holds a '" + h.kind + "' checkpoint, expected a detector");
  std::unique_ptr<detect::PeriocularDetector> det;
  try {
    det = std::make_unique<detect::PeriocularDetector>(detector_config_from_json(h.config));
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": bad detector config: " + e.what());
  }
  load_checkpoint_weights(path, *det);
  if (header) *header = std::move(h);
  return det;
}

std::unique_ptr<seg::SegmentationModel> load_segmenter(const fs::path& path, std::optional<seg::Kind> expected,
                                                       CheckpointHeader* header) {
  CheckpointHeader h = read_checkpoint_header(path);
  if (h.kind != "fcn" && h.kind != "segnet" && h.kind != "gan")
    throw DataError(path.string() + " holds a '" + h.kind + "' checkpoint, expected a segmenter");
  if (expected && h.kind != checkpoint_kind(*expected))
    throw DataError(path.string() + " holds a '" + h.kind + "' segmenter, but '" + checkpoint_kind(*expected) +
                    "' was requested");
  std::unique_ptr<seg::SegmentationModel> model;
  try {
    model = std::make_unique<seg::SegmentationModel>(segmenter_config_from_json(h.config));
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": bad segmenter config: " + e.what());
  }
  load_checkpoint_weights(path, *model);
  if (header) *header = std::move(h);
  return model;
}

}  // namespace sclera::train
