#include "sclera/eval/report.hpp"

#include "sclera/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sclera::eval {

ReportRow aggregate(const std::vector<MetricsRecord>& records, std::string database, std::string approach) {
  std::vector<double> p, r, f;
  for (const auto& rec : records) {
    p.push_back(rec.precision);
    r.push_back(rec.recall);
    f.push_back(rec.f_score);
  }
  ReportRow row;
  row.database = std::move(database);
  row.approach = std::move(approach);
  row.precision = mean_std(p);
  row.recall = mean_std(r);
  row.f_score = mean_std(f);
  row.images = static_cast<Index>(records.size());
  return row;
}

namespace {

// Hundredths, rounded half up. The small bias absorbs binary representation
// error so that e.g. 0.125 * 100 rounds the way its decimal form suggests.
long long hundredths(double percent) { return static_cast<long long>(std::floor(percent * 100.0 + 0.5 + 1e-7)); }

std::string two_decimals(double percent, int min_int_digits) {
  const long long h = hundredths(percent);
  const bool negative = h < 0;
  const long long a = negative ? -h : h;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*lld.%02lld", negative ? "-" : "", min_int_digits, a / 100, a % 100);
  return buf;
}

size_t display_width(const std::string& s) {
  size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace

std::string format_percent(double percent) { return two_decimals(percent, 1); }

std::string format_mean_std(const MeanStd& v) {
  return two_decimals(v.mean * 100.0, 2) + " ± " + two_decimals(v.std * 100.0, 2);
}

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format) {
  if (rows.empty()) throw std::invalid_argument("report: no rows");
  std::vector<std::vector<std::string>> table{{"Database", "Approach", "Recall (%)", "Precision (%)", "F-score (%)"}};
  for (const auto& r : rows)
    table.push_back({r.database, r.approach, format_mean_std(r.recall), format_mean_std(r.precision),
                     format_mean_std(r.f_score)});
  std::ostringstream out;
  if (format == ReportFormat::Csv) {
    for (const auto& line : table) {
      for (size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << line[i];
      out << '\n';
    }
    return out.str();
  }
  std::vector<size_t> width(table.front().size(), 0);
  for (const auto& line : table)
    for (size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], display_width(line[i]));
  for (const auto& line : table) {
    std::string text;
    for (size_t i = 0; i < line.size(); ++i) {
      if (i) text += "  ";
      text += line[i];
      if (i + 1 < line.size()) text.append(width[i] - display_width(line[i]), ' ');
    }
    out << text << '\n';
  }
  return out.str();
}

std::string serialize_records(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  out << "id,precision,recall,f_score\n";
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.precision, r.recall, r.f_score);
    out << r.id << ',' << buf << '\n';
  }
  return out.str();
}

std::vector<MetricsRecord> parse_records(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<MetricsRecord> out;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "id,precision,recall,f_score") throw DataError("metrics file: unexpected header '" + line + "'");
      continue;
    }
    std::istringstream fields(line);
    MetricsRecord r;
    std::string p, rc, f;
    if (!std::getline(fields, r.id, ',') || !std::getline(fields, p, ',') || !std::getline(fields, rc, ',') ||
        !std::getline(fields, f))
      throw DataError("metrics file: malformed line " + std::to_string(line_no));
    try {
      r.precision = std::stod(p);
      r.recall = std::stod(rc);
      r.f_score = std::stod(f);
    } catch (const std::exception&) {
      throw DataError("metrics file: bad number on line " + std::to_string(line_no));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sclera::eval
