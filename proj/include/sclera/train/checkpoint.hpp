#pragma once

#include "sclera/nn/layer.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace sclera::train {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Everything a checkpoint says about itself besides the weights.
struct CheckpointHeader {
  std::string kind;     // "detector", "fcn", "segnet" or "gan"
  json config;          // constructor configuration of the model
  json metadata;        // training sensors, epoch, validation score, ...
  std::string model_spec;  // describe() rendering, for inspection
};

/// Binary container: magic "SCLRCKPT", uint32 version, uint64 header length,
/// a JSON header (kind, config, metadata, model spec and the name, shape and
/// offset of every tensor), then the tensors as little-endian float32.
/// Written to a temporary file and renamed into place.
void save_checkpoint(const fs::path& path, const CheckpointHeader& header, nn::Module<float>& model);

/// Throws DataError on a missing, truncated or foreign file.
CheckpointHeader read_checkpoint_header(const fs::path& path);

/// Loads every tensor into `model`; names and shapes must match exactly.
void load_checkpoint_weights(const fs::path& path, nn::Module<float>& model);

/// Copies of all parameter values (trainable or not), in visiting order.
std::vector<Eigen::VectorXf> snapshot(nn::Module<float>& model);
void restore(nn::Module<float>& model, const std::vector<Eigen::VectorXf>& values);

}  // namespace sclera::train
