#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "syngcn/matrix.hpp"
#include "syngcn/vocab.hpp"

namespace syngcn {

// Cosine similarity clamped to [-1, 1]; defined as 0 when either vector is
// all zero.
double cosine(const float* u, const float* v, size_t dim);
double cosine(const std::vector<float>& u, const std::vector<float>& v);

// Spearman rank correlation: Pearson over average-tie ranks.
double spearman(const std::vector<double>& gold,
                const std::vector<double>& pred);

struct SimilarityRow {
  std::string word1, word2;
  double gold;
};

struct SimilarityDataset {
  std::vector<SimilarityRow> rows;
};

// "word1<TAB>word2<TAB>score" lines.
SimilarityDataset load_similarity_dataset(std::istream& in);
SimilarityDataset load_similarity_dataset_file(const std::string& path);

struct SimilarityResult {
  double rho = 0.0;
  double coverage = 0.0;  // fraction of rows with both words in vocab
  size_t rows_used = 0;
  size_t rows_skipped = 0;
};

SimilarityResult eval_similarity(const MatrixF& embeddings,
                                 const Vocabulary& vocab,
                                 const SimilarityDataset& dataset);

struct AnalogyQuad {
  std::string a, b, c, d;
};

// "a b c d" whitespace-separated lines; ':'-prefixed section headers skipped.
std::vector<AnalogyQuad> load_analogy_dataset(std::istream& in);
std::vector<AnalogyQuad> load_analogy_dataset_file(const std::string& path);

enum class AnalogyMethod { CosAdd, CosMul };

struct AnalogyResult {
  double accuracy = 0.0;
  size_t quads_used = 0;
  size_t quads_skipped = 0;
};

// 3CosAdd by default: argmax_d cos(x_d, x_b - x_a + x_c) over the full
// vocabulary, excluding a, b, c. Quadruples with any OOV word are skipped.
AnalogyResult eval_analogy(const MatrixF& embeddings, const Vocabulary& vocab,
                           const std::vector<AnalogyQuad>& quads,
                           AnalogyMethod method = AnalogyMethod::CosAdd);

struct Neighbor {
  uint32_t id;
  std::string word;
  double cosine;
};

// Top-k by cosine, query excluded, ties broken by word id ascending.
std::vector<Neighbor> nearest_neighbors(const MatrixF& embeddings,
                                        const Vocabulary& vocab,
                                        const std::string& word, size_t k);

}  // namespace syngcn
