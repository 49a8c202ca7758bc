#include "syngcn/io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "syngcn/common.hpp"

namespace syngcn {

void save_embeddings(const MatrixF& vectors, const Vocabulary& vocab,
                     std::ostream& out) {
  require_shape(vectors, vocab.size(), vectors.cols(), "save_embeddings");
  out << vectors.rows() << ' ' << vectors.cols() << '\n';
  char buf[48];
  for (uint32_t i = 0; i < vectors.rows(); ++i) {
    const std::string& w = vocab.word(i);
    if (w.empty() || w.find_first_of(" \t\n\r") != std::string::npos)
      throw DataError("cannot serialize word with whitespace: '" + w + "'");
    out << w;
    for (size_t j = 0; j < vectors.cols(); ++j) {
      std::snprintf(buf, sizeof buf, " %.6f",
                    static_cast<double>(vectors(i, j)));
      out << buf;
    }
    out << '\n';
  }
}

void save_embeddings(const MatrixF& vectors, const Vocabulary& vocab,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embeddings file: " + path);
  save_embeddings(vectors, vocab, out);
  if (!out) throw DataError("failed writing embeddings file: " + path);
}

PretrainedEmbeddings load_pretrained(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty embeddings file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  size_t rows = 0, dim = 0;
  {
    std::istringstream head(line);
    std::string extra;
    if (!(head >> rows >> dim) || (head >> extra) || rows == 0 || dim == 0)
      throw DataError("embeddings line 1: expected '<count> <dim>' header");
  }
  std::vector<std::string> words;
  std::vector<uint64_t> counts;
  std::unordered_set<std::string> seen;
  MatrixF input(rows, dim);
  size_t line_no = 1;
  for (size_t i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw DataError("embeddings file truncated: expected " +
                      std::to_string(rows) + " rows, got " +
                      std::to_string(i));
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream row(line);
    std::string word;
    if (!(row >> word))
      throw DataError("embeddings line " + std::to_string(line_no) +
                      ": missing word");
    if (!seen.insert(word).second)
      throw DataError("embeddings file has duplicate word: " + word);
    size_t j = 0;
    std::string tok;
    while (row >> tok) {
      if (j >= dim) break;
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size())
        throw DataError("embeddings line " + std::to_string(line_no) +
                        ": bad value '" + tok + "'");
      input(i, j++) = static_cast<float>(v);
    }
    if (j != dim || (row >> tok))
      throw DataError("embeddings line " + std::to_string(line_no) +
                      ": expected " + std::to_string(dim) + " values");
    words.push_back(std::move(word));
    counts.push_back(1);
  }
  PretrainedEmbeddings out{
      EmbeddingStoreF{input, input},
      Vocabulary(std::move(words), std::move(counts), Vocabulary::kNoUnk)};
  return out;
}

PretrainedEmbeddings load_pretrained_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embeddings file: " + path);
  return load_pretrained(in);
}

void RunManifest::save(const std::string& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["flags"] = flags;
  j["vocabulary_hash"] = vocabulary_hash;
  j["input_sizes"] = input_sizes;
  j["seed"] = seed;
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["metrics"] = metrics;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest file: " + path);
  out << j.dump(2) << '\n';
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad manifest " + path + ": " + e.what());
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.flags = j.at("flags").get<std::map<std::string, std::string>>();
    m.vocabulary_hash = j.at("vocabulary_hash").get<uint64_t>();
    m.input_sizes = j.at("input_sizes").get<std::map<std::string, uint64_t>>();
    m.seed = j.at("seed").get<uint64_t>();
    m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    m.metrics = j.at("metrics").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad manifest " + path + ": " + e.what());
  }
  return m;
}

uint64_t file_size_bytes(const std::string& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw DataError("cannot stat file: " + path);
  return static_cast<uint64_t>(size);
}

}  // namespace syngcn
