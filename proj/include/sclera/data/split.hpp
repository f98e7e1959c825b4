#pragma once

#include "sclera/data/dataset.hpp"

#include <array>
#include <cstdint>

namespace sclera::data {

enum class Subset { Train, Validation, Test };

std::string to_string(Subset s);

struct SplitRatios {
  double train = 0.40;
  double validation = 0.20;
  double test = 0.40;
};

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  const std::vector<std::string>& ids(Subset s) const;
  /// Subset of the given id, if it is assigned at all.
  std::optional<Subset> subset_of(const std::string& id) const;
};

/// Seeded Fisher-Yates shuffle of the manifest ids, then
/// |train| = round(r.train * N), |validation| = round(r.validation * N),
/// test takes the remainder. Each list is returned sorted by id.
SplitAssignment make_splits(const Manifest& manifest, SplitRatios ratios, std::uint64_t seed);
SplitAssignment make_splits(const std::vector<std::string>& ids, SplitRatios ratios, std::uint64_t seed);

/// Header lines record seed and ratios; then one `id<TAB>split<TAB>sensor`
/// line per sample, in manifest order.
std::string serialize_split(const SplitAssignment& split, const Manifest& manifest);
SplitAssignment parse_split(const std::string& text);
SplitAssignment read_split(const fs::path& path);

/// Samples of `manifest` assigned to `subset`, in manifest order.
std::vector<ImageSample> select(const Manifest& manifest, const SplitAssignment& split, Subset subset);

}  // namespace sclera::data
