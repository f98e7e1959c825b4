#include "sclera/eval/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace sclera::eval {

PixelCounts pixel_counts(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw std::invalid_argument("pixel_counts: mask sizes differ (" + std::to_string(pred.width()) + "x" +
                                std::to_string(pred.height()) + " vs " + std::to_string(gt.width()) + "x" +
                                std::to_string(gt.height()) + ")");
  const auto& p = pred.array();
  const auto& g = gt.array();
  PixelCounts c;
  c.tp = (p && g).count();
  c.fp = (p && !g).count();
  c.fn = (!p && g).count();
  c.tn = p.size() - c.tp - c.fp - c.fn;
  return c;
}

MetricsRecord metrics(const PixelCounts& c, std::string id) {
  MetricsRecord r;
  r.id = std::move(id);
  const auto ratio = [](Index num, Index den, Index other_miss) {
    if (den == 0) return other_miss == 0 ? 1.0 : 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(c.tp, c.tp + c.fp, c.fn);
  r.recall = ratio(c.tp, c.tp + c.fn, c.fp);
  const double s = r.precision + r.recall;
  r.f_score = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

}  // namespace sclera::eval
