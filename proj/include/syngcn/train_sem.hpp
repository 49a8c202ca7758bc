#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "syngcn/adam.hpp"
#include "syngcn/embedding.hpp"
#include "syngcn/graph.hpp"
#include "syngcn/loss.hpp"
#include "syngcn/model.hpp"
#include "syngcn/vocab.hpp"

namespace syngcn {

struct RetrofitConfig {
  double lr = 0.001;
  size_t epochs = 5;
  size_t negatives = 5;
  std::vector<SemanticRelation> relations = {
      SemanticRelation::Synonym, SemanticRelation::Antonym,
      SemanticRelation::Hypernym, SemanticRelation::Hyponym};
  double anchor_weight = 1.0;  // ties encoded vectors to the initialization
  uint64_t seed = 1;
  size_t batch_words = 128;
  double noise_power = 0.75;
  bool gating = true;
  bool deterministic = false;
  size_t threads = 0;
  // Extension beyond the base method: adds -antonym_repel * cos(h_w, X_u)
  // for each antonym neighbor u of w. Off at 0.
  double antonym_repel = 0.0;
};

template <typename S>
struct SemGrads {
  GcnParams<S> params;
  SparseRowGrads<S> output_rows;

  SemGrads(const GcnConfig& config, size_t num_labels, size_t dim)
      : params(GcnParams<S>::zeros(config, num_labels)), output_rows(dim) {}

  void clear() {
    params.set_zero();
    output_rows.clear();
  }

  void merge(const SemGrads& other) {
    std::vector<std::pair<S*, size_t>> mine;
    for_each_tensor(params, [&](const std::string&, S* d, size_t n) {
      mine.emplace_back(d, n);
    });
    size_t k = 0;
    for_each_tensor(const_cast<GcnParams<S>&>(other.params),
                    [&](const std::string&, const S* d, size_t n) {
                      S* dst = mine[k++].first;
                      for (size_t i = 0; i < n; ++i) dst[i] += d[i];
                    });
    output_rows.merge(other.output_rows);
  }
};

// Combined retrofit loss for one word over its 1-hop star graph (node 0 is
// the word itself): self-prediction with negative sampling plus the anchor
// term lambda * ||h_w - X_w||^2. The initialization X is frozen; gradients
// flow to the encoder parameters and the output rows only. With `grads`
// null only the loss is computed. `repel_rows` lists anchor rows of antonym
// neighbors for the optional repulsion term.
template <typename S>
double retrofit_word_loss(const SentenceGraph& star,
                          const Matrix<S>& node_inputs,
                          const GcnParams<S>& params,
                          const Matrix<S>& output_embeddings,
                          const Matrix<S>& anchors, uint32_t word,
                          const std::vector<uint32_t>& negatives,
                          double lambda, double repel,
                          const std::vector<uint32_t>& repel_rows,
                          SemGrads<S>* grads) {
  const size_t dim = params.config.dim;
  ForwardTape<S> tape;
  Matrix<S> hidden =
      gcn_forward(node_inputs, star, params, grads ? &tape : nullptr);
  const S* h = hidden.row(0);
  std::vector<S> context_grad(dim);
  double loss;
  if (grads) {
    loss = target_loss(h, dim, word, negatives, output_embeddings,
                       context_grad.data(), grads->output_rows);
  } else {
    SparseRowGrads<S> scratch(dim);
    loss = target_loss(h, dim, word, negatives, output_embeddings,
                       context_grad.data(), scratch);
  }
  const S* x = anchors.row(word);
  for (size_t j = 0; j < dim; ++j) {
    const double diff = static_cast<double>(h[j]) - static_cast<double>(x[j]);
    loss += lambda * diff * diff;
    if (grads)
      context_grad[j] =
          static_cast<S>(static_cast<double>(context_grad[j]) +
                         2.0 * lambda * diff);
  }
  if (repel != 0.0) {
    const double hn = std::sqrt(squared_norm(h, dim));
    for (uint32_t u : repel_rows) {
      const S* xu = anchors.row(u);
      const double un = std::sqrt(squared_norm(xu, dim));
      if (hn == 0.0 || un == 0.0) continue;
      const double cos = dot(h, xu, dim) / (hn * un);
      loss -= repel * cos;
      if (grads) {
        // d cos / dh = xu/(|h||xu|) - cos * h/|h|^2
        for (size_t j = 0; j < dim; ++j) {
          const double dcos = static_cast<double>(xu[j]) / (hn * un) -
                              cos * static_cast<double>(h[j]) / (hn * hn);
          context_grad[j] = static_cast<S>(
              static_cast<double>(context_grad[j]) - repel * dcos);
        }
      }
    }
  }
  if (grads) {
    Matrix<S> upstream(star.node_count(), dim);
    for (size_t j = 0; j < dim; ++j) upstream(0, j) = context_grad[j];
    Matrix<S> input_grads;
    gcn_backward(tape, upstream, star, params, grads->params, input_grads);
  }
  return loss;
}

struct RetrofitResult {
  // `input` holds the exported vectors: the encoded h_w for words with
  // relation edges, the untouched X_w for the rest. `output` is the trained
  // target matrix.
  EmbeddingStoreF store;
  GcnParamsF params;
  std::vector<double> epoch_losses;
  size_t connected_words = 0;
  double final_loss = 0.0;
};

RetrofitResult retrofit(const EmbeddingStoreF& init,
                        const SemanticGraph& graph, const Vocabulary& vocab,
                        const RetrofitConfig& config,
                        std::ostream* log = nullptr);

}  // namespace syngcn
