#pragma once

#include "sclera/tensor.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sclera::data {

namespace fs = std::filesystem;

enum class SensorTag { UBIRIS_V2, MICHE_GS4, MICHE_IP5, MICHE_GT2 };

std::string to_string(SensorTag tag);
SensorTag parse_sensor(const std::string& s);

/// A database name as used on the command line: a single tag, or the
/// aliases UBIRIS (= UBIRIS_V2) and MICHE (= GS4 + IP5 + GT2).
std::set<SensorTag> parse_database(const std::string& s);
std::string database_label(const std::set<SensorTag>& tags);

struct ImageSample {
  std::string id;
  fs::path image_path;
  std::optional<fs::path> mask_path;
  SensorTag sensor = SensorTag::UBIRIS_V2;
  Index width = 0;
  Index height = 0;
};

struct Manifest {
  fs::path root;
  std::vector<ImageSample> samples;  // sorted by id

  const ImageSample* find(const std::string& id) const;
  std::vector<ImageSample> with_sensors(const std::set<SensorTag>& tags) const;
};

/// Which files under a root are images, which sensor each belongs to, and
/// where the matching mask lives.
///
/// Text form, one directive per line (`#` starts a comment):
///
///     image   <SENSOR> <glob relative to root>
///     exclude <glob>
///     mask    <template using {dir} and {stem}>
///
/// Globs use fnmatch syntax and are matched against the path relative to
/// the root. Mask templates are tried in order; the first existing file wins.
struct Layout {
  struct ImageRule {
    SensorTag sensor;
    std::string pattern;
  };
  std::vector<ImageRule> images;
  std::vector<std::string> excludes;
  std::vector<std::string> masks;

  static Layout parse(const std::string& text);
  static Layout read(const fs::path& path);
  /// images/<anything> for one sensor, masks at masks/{stem}.png.
  static Layout single(SensorTag sensor);
};

/// Scans `root` according to `layout`. Images that cannot be decoded are
/// skipped with a warning; a mask whose size differs from its image throws
/// DataError. A missing root throws DataError.
Manifest load_dataset(const fs::path& root, const Layout& layout);

std::string serialize_manifest(const Manifest& m);
Manifest parse_manifest(const std::string& text);
Manifest read_manifest(const fs::path& path);
void write_manifest(const Manifest& m, const fs::path& path);

}  // namespace sclera::data
