#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "syngcn/embedding.hpp"
#include "syngcn/matrix.hpp"
#include "syngcn/vocab.hpp"

namespace syngcn {

// word2vec text format: header "<count> <dim>", then one
// "<word> v1 ... vd" line per word with values at 6 decimal places.
void save_embeddings(const MatrixF& vectors, const Vocabulary& vocab,
                     const std::string& path);
void save_embeddings(const MatrixF& vectors, const Vocabulary& vocab,
                     std::ostream& out);

struct PretrainedEmbeddings {
  EmbeddingStoreF store;  // output starts as a copy of input
  Vocabulary vocab;       // word order of the file, no unk entry
};

PretrainedEmbeddings load_pretrained(std::istream& in);
PretrainedEmbeddings load_pretrained_file(const std::string& path);

// Reproducibility record written next to every output artifact.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> flags;
  uint64_t vocabulary_hash = 0;
  std::map<std::string, uint64_t> input_sizes;  // path -> bytes
  uint64_t seed = 0;
  double wall_clock_seconds = 0.0;
  std::map<std::string, std::string> metrics;

  void save(const std::string& path) const;
  static RunManifest load(const std::string& path);
};

uint64_t file_size_bytes(const std::string& path);

}  // namespace syngcn
