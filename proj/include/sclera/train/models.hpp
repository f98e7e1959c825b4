#pragma once

#include "sclera/detect/detector.hpp"
#include "sclera/seg/segmenter.hpp"
#include "sclera/train/checkpoint.hpp"

#include <memory>

namespace sclera::train {

json to_json(const detect::DetectorConfig& cfg);
detect::DetectorConfig detector_config_from_json(const json& j);
json to_json(const seg::SegmenterConfig& cfg);
seg::SegmenterConfig segmenter_config_from_json(const json& j);

/// Checkpoint kind tag: "fcn", "segnet" or "gan".
std::string checkpoint_kind(seg::Kind kind);
inline constexpr const char* kDetectorKind = "detector";

void save_detector(const fs::path& path, detect::PeriocularDetector& detector, const json& metadata);
void save_segmenter(const fs::path& path, seg::SegmentationModel& model, const json& metadata);

/// Rebuilds the model from the header and loads its weights. A checkpoint of
/// another kind (or, for segmenters, another approach than `expected`)
/// throws DataError.
std::unique_ptr<detect::PeriocularDetector> load_detector(const fs::path& path, CheckpointHeader* header = nullptr);
std::unique_ptr<seg::SegmentationModel> load_segmenter(const fs::path& path, std::optional<seg::Kind> expected = {},
                                                       CheckpointHeader* header = nullptr);

}  // namespace sclera::train
