#include "sclera/train/checkpoint.hpp"

#include "sclera/error.hpp"

#include <cstring>
#include <fstream>
#include <map>

namespace sclera::train {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'L', 'R', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(sizeof(float) == 4);

template <typename T>
void write_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  for (size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw DataError("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

void write_floats(std::ostream& out, const float* data, Index n) {
  for (Index i = 0; i < n; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, data + i, 4);
    write_le(out, bits);
  }
}

struct Opened {
  std::ifstream in;
  json header;
  std::streamoff data_start = 0;
};

Opened open_checkpoint(const fs::path& path) {
  Opened o;
  o.in.open(path, std::ios::binary);
  if (!o.in) throw DataError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!o.in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw DataError(path.string() + " is not a checkpoint");
  const auto version = read_le<std::uint32_t>(o.in);
  if (version != kVersion) throw DataError("checkpoint " + path.string() + ": unsupported version " + std::to_string(version));
  const auto length = read_le<std::uint64_t>(o.in);
  if (length > (std::uint64_t(1) << 32)) throw DataError("checkpoint " + path.string() + ": implausible header length");
  std::string text(length, '\0');
  if (!o.in.read(text.data(), static_cast<std::streamsize>(length))) throw DataError("checkpoint: truncated header");
  try {
    o.header = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": bad header: " + e.what());
  }
  o.data_start = o.in.tellg();
  return o;
}

}  // namespace

void save_checkpoint(const fs::path& path, const CheckpointHeader& header, nn::Module<float>& model) {
  json h;
  h["kind"] = header.kind;
  h["config"] = header.config;
  h["metadata"] = header.metadata;
  h["model_spec"] = header.model_spec;
  json tensors = json::array();
  std::vector<const nn::Parameter<float>*> params;
  Index offset = 0;
  model.visit_parameters([&](const std::string& name, nn::Parameter<float>& p) {
    tensors.push_back({{"name", name}, {"shape", p.dims}, {"offset", offset}, {"count", p.value.size()}});
    offset += p.value.size();
    params.push_back(&p);
  });
  h["tensors"] = tensors;
  const std::string text = h.dump(2);

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint " + tmp.string());
    out.write(kMagic, 8);
    write_le<std::uint32_t>(out, kVersion);
    write_le<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto* p : params) write_floats(out, p->value.data(), p->value.size());
    if (!out) throw DataError("error writing checkpoint " + tmp.string());
  }
  fs::rename(tmp, path);
}

CheckpointHeader read_checkpoint_header(const fs::path& path) {
  Opened o = open_checkpoint(path);
  CheckpointHeader h;
  try {
    h.kind = o.header.at("kind").get<std::string>();
    h.config = o.header.at("config");
    h.metadata = o.header.value("metadata", json::object());
    h.model_spec = o.header.value("model_spec", std::string());
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": " + e.what());
  }
  return h;
}

void load_checkpoint_weights(const fs::path& path, nn::Module<float>& model) {
  Opened o = open_checkpoint(path);
  std::map<std::string, json> entries;
  for (const auto& t : o.header.at("tensors")) entries[t.at("name").get<std::string>()] = t;
  size_t seen = 0;
  model.visit_parameters([&](const std::string& name, nn::Parameter<float>& p) {
    auto it = entries.find(name);
    if (it == entries.end()) throw DataError("checkpoint " + path.string() + " lacks tensor " + name);
    const auto dims = it->second.at("shape").get<std::vector<Index>>();
    if (dims != p.dims) throw DataError("checkpoint " + path.string() + ": shape mismatch for " + name);
    const auto offset = it->second.at("offset").get<Index>();
    o.in.clear();
    o.in.seekg(o.data_start + static_cast<std::streamoff>(offset) * 4);
    for (Index i = 0; i < p.value.size(); ++i) {
      const auto bits = read_le<std::uint32_t>(o.in);
      std::memcpy(p.value.data() + i, &bits, 4);
    }
    ++seen;
  });
  if (seen != entries.size()) throw DataError("checkpoint " + path.string() + " holds tensors the model does not have");
}

std::vector<Eigen::VectorXf> snapshot(nn::Module<float>& model) {
  std::vector<Eigen::VectorXf> out;
  model.visit_parameters([&](const std::string&, nn::Parameter<float>& p) { out.push_back(p.value); });
  return out;
}

void restore(nn::Module<float>& model, const std::vector<Eigen::VectorXf>& values) {
  size_t i = 0;
  model.visit_parameters([&](const std::string&, nn::Parameter<float>& p) {
    if (i >= values.size() || values[i].size() != p.value.size()) throw std::logic_error("restore: snapshot does not fit the model");
    p.value = values[i++];
  });
}

}  // namespace sclera::train
