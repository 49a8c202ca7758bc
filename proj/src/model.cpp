#include "syngcn/model.hpp"

#include <cstring>
#include <fstream>

#include "syngcn/common.hpp"

namespace syngcn {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'C', 'N'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw DataError(std::string("checkpoint truncated while reading ") + what);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

void write_f32_array(std::ostream& out, const float* data, size_t n) {
  static_assert(sizeof(float) == 4);
  // Little-endian layout; this writes the native representation, which is
  // little-endian on every platform this project targets.
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(n * sizeof(float)));
}

void read_f32_array(std::istream& in, float* data, size_t n,
                    const std::string& what) {
  if (!in.read(reinterpret_cast<char*>(data),
               static_cast<std::streamsize>(n * sizeof(float))))
    throw DataError("checkpoint truncated while reading " + what);
}

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in, const char* what) {
  const uint32_t n = read_u32(in, what);
  if (n > (1u << 20))
    throw DataError(std::string("checkpoint corrupt: oversized string in ") +
                    what);
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n))
    throw DataError(std::string("checkpoint truncated while reading ") + what);
  return s;
}

}  // namespace

void save_checkpoint(const GcnParamsF& params, const LabelSet& labels,
                     const std::vector<float>& placeholder,
                     const std::string& path) {
  if (labels.size() != params.num_labels)
    throw std::invalid_argument(
        "save_checkpoint: label inventory does not match parameters");
  if (!placeholder.empty() && placeholder.size() != params.config.dim)
    throw std::invalid_argument(
        "save_checkpoint: placeholder dimension mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint file: " + path);

  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<uint32_t>(params.config.dim));
  write_u32(out, static_cast<uint32_t>(params.config.layers));
  write_u32(out, static_cast<uint32_t>(params.num_labels));
  const unsigned char flags[4] = {
      static_cast<unsigned char>(params.config.gating ? 1 : 0),
      static_cast<unsigned char>(params.config.normalize ? 1 : 0),
      static_cast<unsigned char>(placeholder.empty() ? 0 : 1), 0};
  out.write(reinterpret_cast<const char*>(flags), 4);
  for (size_t i = 0; i < labels.size(); ++i)
    write_string(out, labels.label(static_cast<uint32_t>(i)));
  for_each_tensor(params,
                  [&](const std::string&, const float* data, size_t size) {
                    write_f32_array(out, data, size);
                  });
  if (!placeholder.empty())
    write_f32_array(out, placeholder.data(), placeholder.size());
  if (!out) throw DataError("failed writing checkpoint file: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint file: " + path);

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a checkpoint file: " + path);
  const uint32_t version = read_u32(in, "version");
  if (version != kVersion)
    throw DataError("unsupported checkpoint version " +
                    std::to_string(version));
  GcnConfig config;
  config.dim = read_u32(in, "dim");
  config.layers = read_u32(in, "layers");
  const uint32_t num_labels = read_u32(in, "label count");
  unsigned char flags[4];
  if (!in.read(reinterpret_cast<char*>(flags), 4))
    throw DataError("checkpoint truncated while reading flags");
  config.gating = flags[0] != 0;
  config.normalize = flags[1] != 0;
  const bool has_placeholder = flags[2] != 0;
  if (config.dim == 0 || config.layers == 0 || num_labels == 0)
    throw DataError("checkpoint corrupt: empty model shape");

  Checkpoint cp;
  for (uint32_t i = 0; i < num_labels; ++i) {
    const std::string label = read_string(in, "label table");
    if (i == LabelSet::kSelf) {
      if (label != LabelSet::kSelfLabel)
        throw DataError("checkpoint corrupt: label 0 must be the self label");
      continue;
    }
    if (cp.labels.get_or_add(label) != i)
      throw DataError("checkpoint corrupt: duplicate label " + label);
  }
  cp.labels.freeze();

  cp.params = GcnParamsF::zeros(config, num_labels);
  for_each_tensor(cp.params,
                  [&](const std::string& name, float* data, size_t size) {
                    read_f32_array(in, data, size, name);
                  });
  if (has_placeholder) {
    cp.placeholder.resize(config.dim);
    read_f32_array(in, cp.placeholder.data(), cp.placeholder.size(),
                   "placeholder");
  }
  char extra;
  if (in.read(&extra, 1))
    throw DataError("checkpoint corrupt: trailing bytes");
  return cp;
}

}  // namespace syngcn
