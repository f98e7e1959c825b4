#include "sclera/data/split.hpp"

#include "sclera/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <unordered_map>

namespace sclera::data {

namespace {

/// Unbiased draw from [0, bound] on top of the raw 64-bit engine output, so
/// the permutation does not depend on the standard library's distributions.
std::uint64_t draw_inclusive(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t range = bound + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % range;
}

}  // namespace

std::string to_string(Subset s) {
  switch (s) {
    case Subset::Train: return "train";
    case Subset::Validation: return "validation";
    case Subset::Test: return "test";
  }
  return "?";
}

const std::vector<std::string>& SplitAssignment::ids(Subset s) const {
  switch (s) {
    case Subset::Train: return train;
    case Subset::Validation: return validation;
    case Subset::Test: return test;
  }
  return test;
}

std::optional<Subset> SplitAssignment::subset_of(const std::string& id) const {
  for (Subset s : {Subset::Train, Subset::Validation, Subset::Test}) {
    const auto& v = ids(s);
    if (std::binary_search(v.begin(), v.end(), id)) return s;
  }
  return std::nullopt;
}

SplitAssignment make_splits(const std::vector<std::string>& ids, SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0) throw UsageError("split ratios must be non-negative");
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
    throw UsageError("split ratios must sum to 1");
  const size_t n = ids.size();
  if (n < 3) throw DataError("need at least 3 samples to split, got " + std::to_string(n));

  std::vector<std::string> order = ids;
  std::sort(order.begin(), order.end());
  std::mt19937_64 rng(seed);
  for (size_t i = n - 1; i > 0; --i) std::swap(order[i], order[draw_inclusive(rng, i)]);

  const auto n_train = static_cast<size_t>(std::llround(ratios.train * static_cast<double>(n)));
  const auto n_val = std::min(n - n_train, static_cast<size_t>(std::llround(ratios.validation * static_cast<double>(n))));

  SplitAssignment s;
  s.seed = seed;
  s.ratios = ratios;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  for (auto* v : {&s.train, &s.validation, &s.test}) std::sort(v->begin(), v->end());
  return s;
}

SplitAssignment make_splits(const Manifest& manifest, SplitRatios ratios, std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) ids.push_back(s.id);
  return make_splits(ids, ratios, seed);
}

std::string serialize_split(const SplitAssignment& split, const Manifest& manifest) {
  std::ostringstream os;
  os << "# sclera split v1\n";
  os << "# seed\t" << split.seed << "\n";
  os << std::fixed << std::setprecision(2);
  os << "# ratios\t" << split.ratios.train << '\t' << split.ratios.validation << '\t' << split.ratios.test << "\n";
  os << "# id\tsplit\tsensor\n";
  for (const auto& s : manifest.samples) {
    const auto subset = split.subset_of(s.id);
    if (!subset) throw DataError("split does not cover sample " + s.id);
    os << s.id << '\t' << to_string(*subset) << '\t' << to_string(s.sensor) << '\n';
  }
  return os.str();
}

SplitAssignment parse_split(const std::string& text) {
  SplitAssignment split;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# seed\t", 0) == 0) {
      split.seed = std::stoull(line.substr(7));
      continue;
    }
    if (line.rfind("# ratios\t", 0) == 0) {
      std::istringstream r(line.substr(9));
      r >> split.ratios.train >> split.ratios.validation >> split.ratios.test;
      continue;
    }
    if (line[0] == '#') continue;
    std::istringstream f(line);
    std::string id, subset, sensor;
    if (!std::getline(f, id, '\t') || !std::getline(f, subset, '\t')) throw DataError("split: malformed line '" + line + "'");
    if (subset == "train") split.train.push_back(id);
    else if (subset == "validation") split.validation.push_back(id);
    else if (subset == "test") split.test.push_back(id);
    else throw DataError("split: unknown subset '" + subset + "'");
  }
  for (auto* v : {&split.train, &split.validation, &split.test}) std::sort(v->begin(), v->end());
  return split;
}

SplitAssignment read_split(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_split(ss.str());
}

std::vector<ImageSample> select(const Manifest& manifest, const SplitAssignment& split, Subset subset) {
  const auto& ids = split.ids(subset);
  std::vector<ImageSample> out;
  for (const auto& s : manifest.samples)
    if (std::binary_search(ids.begin(), ids.end(), s.id)) out.push_back(s);
  return out;
}

}  // namespace sclera::data
