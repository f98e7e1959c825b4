#include "sclera/data/dataset.hpp"

#include "sclera/error.hpp"
#include "sclera/io.hpp"
#include "sclera/log.hpp"

#include <opencv2/imgcodecs.hpp>

#include <fnmatch.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace sclera::data {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool glob_match(const std::string& pattern, const std::string& path) {
  return fnmatch(pattern.c_str(), path.c_str(), 0) == 0;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) s.replace(pos, from.size(), to);
  return s;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) out.push_back(field);
  return out;
}

}  // namespace

std::string to_string(SensorTag tag) {
  switch (tag) {
    case SensorTag::UBIRIS_V2: return "UBIRIS_V2";
    case SensorTag::MICHE_GS4: return "MICHE_GS4";
    case SensorTag::MICHE_IP5: return "MICHE_IP5";
    case SensorTag::MICHE_GT2: return "MICHE_GT2";
  }
  return "?";
}

SensorTag parse_sensor(const std::string& s) {
  for (SensorTag t : {SensorTag::UBIRIS_V2, SensorTag::MICHE_GS4, SensorTag::MICHE_IP5, SensorTag::MICHE_GT2})
    if (to_string(t) == s) return t;
  throw UsageError("unknown sensor tag '" + s + "'");
}

std::set<SensorTag> parse_database(const std::string& s) {
  if (s == "UBIRIS" || s == "UBIRIS_V2") return {SensorTag::UBIRIS_V2};
  if (s == "MICHE") return {SensorTag::MICHE_GS4, SensorTag::MICHE_IP5, SensorTag::MICHE_GT2};
  if (s == "GS4") return {SensorTag::MICHE_GS4};
  if (s == "IP5") return {SensorTag::MICHE_IP5};
  if (s == "GT2") return {SensorTag::MICHE_GT2};
  return {parse_sensor(s)};
}

std::string database_label(const std::set<SensorTag>& tags) {
  if (tags == parse_database("MICHE")) return "MICHE";
  if (tags == parse_database("UBIRIS")) return "UBIRIS.v2";
  std::string out;
  for (SensorTag t : tags) {
    std::string name = to_string(t);
    if (name.rfind("MICHE_", 0) == 0) name = name.substr(6);
    out += (out.empty() ? "" : "+") + name;
  }
  return out;
}

const ImageSample* Manifest::find(const std::string& id) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), id,
                             [](const ImageSample& s, const std::string& key) { return s.id < key; });
  return it != samples.end() && it->id == id ? &*it : nullptr;
}

std::vector<ImageSample> Manifest::with_sensors(const std::set<SensorTag>& tags) const {
  std::vector<ImageSample> out;
  for (const auto& s : samples)
    if (tags.count(s.sensor)) out.push_back(s);
  return out;
}

Layout Layout::parse(const std::string& text) {
  Layout layout;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string directive;
    fields >> directive;
    const auto bad = [&](const std::string& why) {
      return DataError("layout line " + std::to_string(line_no) + ": " + why);
    };
    if (directive == "image") {
      std::string sensor, pattern;
      if (!(fields >> sensor >> pattern)) throw bad("expected 'image <SENSOR> <glob>'");
      layout.images.push_back({parse_sensor(sensor), pattern});
    } else if (directive == "exclude") {
      std::string pattern;
      if (!(fields >> pattern)) throw bad("expected 'exclude <glob>'");
      layout.excludes.push_back(pattern);
    } else if (directive == "mask") {
      std::string tmpl;
      if (!(fields >> tmpl)) throw bad("expected 'mask <template>'");
      layout.masks.push_back(tmpl);
    } else {
      throw bad("unknown directive '" + directive + "'");
    }
  }
  if (layout.images.empty()) throw DataError("layout declares no image rules");
  return layout;
}

Layout Layout::read(const fs::path& path) { return parse(read_text(path)); }

Layout Layout::single(SensorTag sensor) {
  Layout layout;
  layout.images.push_back({sensor, "images/*"});
  layout.masks.push_back("masks/{stem}.png");
  return layout;
}

Manifest load_dataset(const fs::path& root, const Layout& layout) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError("dataset root " + root.string() + " does not exist");
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files.push_back(entry.path().lexically_relative(root).generic_string());
  }
  std::sort(files.begin(), files.end());

  Manifest manifest;
  manifest.root = root;
  std::map<std::string, std::string> seen;  // id -> relative path
  for (const auto& rel : files) {
    if (std::any_of(layout.excludes.begin(), layout.excludes.end(), [&](const auto& p) { return glob_match(p, rel); }))
      continue;
    auto rule = std::find_if(layout.images.begin(), layout.images.end(),
                             [&](const auto& r) { return glob_match(r.pattern, rel); });
    if (rule == layout.images.end()) continue;

    const fs::path rel_path(rel);
    const std::string dir = rel_path.parent_path().generic_string();
    const std::string stem = rel_path.stem().string();
    ImageSample s;
    s.id = dir.empty() ? stem : dir + "/" + stem;
    if (auto [it, inserted] = seen.emplace(s.id, rel); !inserted)
      throw DataError("duplicate sample id '" + s.id + "' (" + it->second + ", " + rel + ")");
    s.image_path = root / rel_path;
    s.sensor = rule->sensor;

    const cv::Mat image = cv::imread(s.image_path.string(), cv::IMREAD_COLOR);
    if (image.empty()) {
      log_warning("skipping " + rel + ": no decodable pixels");
      continue;
    }
    s.width = image.cols;
    s.height = image.rows;

    for (const auto& tmpl : layout.masks) {
      std::string mask_rel = replace_all(replace_all(tmpl, "{dir}", dir), "{stem}", stem);
      while (mask_rel.rfind("/", 0) == 0) mask_rel.erase(0, 1);
      const fs::path candidate = root / mask_rel;
      if (!fs::is_regular_file(candidate)) continue;
      const cv::Mat mask = cv::imread(candidate.string(), cv::IMREAD_GRAYSCALE);
      if (mask.empty()) throw DataError("mask " + candidate.string() + " cannot be decoded");
      if (mask.cols != image.cols || mask.rows != image.rows) {
        throw DataError("mask " + candidate.string() + " is " + std::to_string(mask.cols) + "x" +
                        std::to_string(mask.rows) + " but image " + rel + " is " + std::to_string(image.cols) + "x" +
                        std::to_string(image.rows));
      }
      s.mask_path = candidate;
      break;
    }
    manifest.samples.push_back(std::move(s));
  }
  std::sort(manifest.samples.begin(), manifest.samples.end(),
            [](const ImageSample& a, const ImageSample& b) { return a.id < b.id; });
  return manifest;
}

std::string serialize_manifest(const Manifest& m) {
  std::ostringstream os;
  os << "# sclera manifest v1\n";
  os << "# root\t" << m.root.generic_string() << "\n";
  os << "# id\tsensor\twidth\theight\timage\tmask\n";
  for (const auto& s : m.samples) {
    os << s.id << '\t' << to_string(s.sensor) << '\t' << s.width << '\t' << s.height << '\t'
       << s.image_path.lexically_relative(m.root).generic_string() << '\t'
       << (s.mask_path ? s.mask_path->lexically_relative(m.root).generic_string() : "-") << '\n';
  }
  return os.str();
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  bool have_root = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# root\t", 0) == 0) {
      m.root = line.substr(7);
      have_root = true;
      continue;
    }
    if (line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 6) throw DataError("manifest: malformed line '" + line + "'");
    ImageSample s;
    s.id = f[0];
    s.sensor = parse_sensor(f[1]);
    s.width = std::stol(f[2]);
    s.height = std::stol(f[3]);
    s.image_path = m.root / f[4];
    if (f[5] != "-") s.mask_path = m.root / f[5];
    m.samples.push_back(std::move(s));
  }
  if (!have_root) throw DataError("manifest: missing root header");
  std::sort(m.samples.begin(), m.samples.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (size_t i = 1; i < m.samples.size(); ++i)
    if (m.samples[i].id == m.samples[i - 1].id) throw DataError("manifest: duplicate id " + m.samples[i].id);
  return m;
}

Manifest read_manifest(const fs::path& path) { return parse_manifest(read_text(path)); }

void write_manifest(const Manifest& m, const fs::path& path) {
  write_text_file(path, serialize_manifest(m));
}

}  // namespace sclera::data
