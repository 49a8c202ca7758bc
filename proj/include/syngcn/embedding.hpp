#pragma once

#include "syngcn/matrix.hpp"

namespace syngcn {

// The two |V| x d matrices of the model: `input` rows feed the encoder as
// neighborhood embeddings, `output` rows are the target vectors scored
// against encoded contexts. Rows never grow beyond the vocabulary.
template <typename S>
struct EmbeddingStore {
  Matrix<S> input;
  Matrix<S> output;

  size_t vocab_size() const { return input.rows(); }
  size_t dim() const { return input.cols(); }
};

using EmbeddingStoreF = EmbeddingStore<float>;

enum class ExportKind { Input, Output, Mean };

// The word-vector matrix a run exports for downstream use.
template <typename S>
Matrix<S> export_embeddings(const EmbeddingStore<S>& store, ExportKind kind) {
  switch (kind) {
    case ExportKind::Input:
      return store.input;
    case ExportKind::Output:
      return store.output;
    case ExportKind::Mean: {
      Matrix<S> out(store.input.rows(), store.input.cols());
      for (size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<S>(
            0.5 * (static_cast<double>(store.input.data()[i]) +
                   static_cast<double>(store.output.data()[i])));
      return out;
    }
  }
  return store.input;
}

}  // namespace syngcn
