#pragma once

#include "sclera/eval/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sclera::eval {

/// One line of a results table; statistics are fractions in [0,1].
struct ReportRow {
  std::string database;
  std::string approach;
  MeanStd recall;
  MeanStd precision;
  MeanStd f_score;
  Index images = 0;
};

/// Per-metric population mean and std over the per-image records.
ReportRow aggregate(const std::vector<MetricsRecord>& records, std::string database, std::string approach);

/// Two decimals, rounding half up.
std::string format_percent(double percent);
/// "mm.mm ± ss.ss" from fractions: both values as percentages, std zero-padded to two integer digits.
std::string format_mean_std(const MeanStd& v);

enum class ReportFormat { Csv, Text };

/// Columns Database, Approach, Recall (%), Precision (%), F-score (%). Throws on an empty row list.
std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format);

/// Per-image metrics file: header `id,precision,recall,f_score`, values with 17 significant digits.
std::string serialize_records(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> parse_records(const std::string& text);

}  // namespace sclera::eval
