#pragma once

#include "sclera/data/mask.hpp"

#include <string>
#include <vector>

namespace sclera::eval {

struct PixelCounts {
  Index tp = 0;
  Index fp = 0;
  Index tn = 0;
  Index fn = 0;

  Index total() const { return tp + fp + tn + fn; }
  friend bool operator==(const PixelCounts&, const PixelCounts&) = default;
};

/// Sclera is the positive class. Throws std::invalid_argument on a size mismatch.
PixelCounts pixel_counts(const BinaryMask& pred, const BinaryMask& gt);

struct MetricsRecord {
  std::string id;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

/// Precision, recall and their harmonic mean. Empty denominators:
/// precision is 1 when nothing was predicted and nothing was missed, else 0
/// (recall likewise with fp); f is 0 when p + r = 0.
MetricsRecord metrics(const PixelCounts& c, std::string id = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

/// Population mean and standard deviation; {0, 0} for an empty input.
MeanStd mean_std(const std::vector<double>& values);

}  // namespace sclera::eval
