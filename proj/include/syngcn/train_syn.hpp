#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "syngcn/adam.hpp"
#include "syngcn/conllu.hpp"
#include "syngcn/embedding.hpp"
#include "syngcn/graph.hpp"
#include "syngcn/loss.hpp"
#include "syngcn/model.hpp"
#include "syngcn/vocab.hpp"

namespace syngcn {

struct TrainConfig {
  double lr = 0.001;
  size_t dim = 300;
  size_t negatives = 5;
  size_t epochs = 5;
  size_t batch_sentences = 128;
  double noise_power = 0.75;
  uint64_t seed = 1;
  double subsample = 1e-4;
  size_t layers = 1;
  bool gating = true;
  bool deterministic = false;  // single worker, fixed iteration order
  size_t threads = 0;          // 0 = available parallelism
  ExportKind export_kind = ExportKind::Input;
  bool lowercase = true;

  GcnConfig gcn() const { return GcnConfig{dim, layers, gating, false}; }
};

// Returns a copy of `inputs` whose row `position` is the placeholder vector;
// the original is untouched. Applied to the prediction target so its own
// embedding cannot leak through the self-loop.
template <typename S>
Matrix<S> mask_target(const Matrix<S>& inputs, size_t position,
                      const std::vector<S>& placeholder) {
  Matrix<S> out = inputs;
  if (position >= out.rows())
    throw std::invalid_argument("mask_target: position out of range");
  for (size_t j = 0; j < out.cols(); ++j)
    out(position, j) = placeholder[j];
  return out;
}

// Everything trainable during a SynGCN run.
struct SynModel {
  EmbeddingStoreF store;
  GcnParamsF params;
  std::vector<float> placeholder;
  LabelSet labels;
};

SynModel init_syn_model(size_t vocab_size, const TrainConfig& config,
                        LabelSet labels);

// Gradients produced by one or more sentence passes.
template <typename S>
struct SynGrads {
  GcnParams<S> params;
  SparseRowGrads<S> input_rows;   // indexed by word id
  SparseRowGrads<S> output_rows;  // indexed by word id
  std::vector<S> placeholder;

  SynGrads(const GcnConfig& config, size_t num_labels, size_t dim)
      : params(GcnParams<S>::zeros(config, num_labels)),
        input_rows(dim),
        output_rows(dim),
        placeholder(dim, S(0)) {}

  void clear() {
    params.set_zero();
    input_rows.clear();
    output_rows.clear();
    placeholder.assign(placeholder.size(), S(0));
  }

  void merge(const SynGrads& other) {
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
    input_rows.merge(other.input_rows);
    output_rows.merge(other.output_rows);
    for (size_t i = 0; i < placeholder.size(); ++i)
      placeholder[i] += other.placeholder[i];
  }
};

// Total negative-sampling loss of one sentence over the given targets, with
// per-target masking. Negatives are supplied by the caller so the same
// function serves training and the 64-bit gradient checks. When `grads` is
// null only the loss is computed.
template <typename S>
double sentence_loss(const SentenceGraph& graph, const Matrix<S>& node_inputs,
                     const GcnParams<S>& params,
                     const std::vector<S>& placeholder,
                     const Matrix<S>& output_embeddings,
                     const std::vector<size_t>& targets,
                     const std::vector<std::vector<uint32_t>>& negatives,
                     SynGrads<S>* grads) {
  const size_t dim = params.config.dim;
  double total = 0.0;
  std::vector<S> context_grad(dim);
  ForwardTape<S> tape;
  Matrix<S> upstream(graph.node_count(), dim);
  Matrix<S> input_grads;
  for (size_t ti = 0; ti < targets.size(); ++ti) {
    const size_t pos = targets[ti];
    const uint32_t target_word = graph.node_word_ids()[pos];
    Matrix<S> masked = mask_target(node_inputs, pos, placeholder);
    Matrix<S> hidden = gcn_forward(masked, graph, params,
                                   grads ? &tape : nullptr);
    if (!grads) {
      SparseRowGrads<S> scratch(dim);
      total += target_loss(hidden.row(pos), dim, target_word, negatives[ti],
                           output_embeddings, context_grad.data(), scratch);
      continue;
    }
    total += target_loss(hidden.row(pos), dim, target_word, negatives[ti],
                         output_embeddings, context_grad.data(),
                         grads->output_rows);
    upstream.fill(S(0));
    for (size_t j = 0; j < dim; ++j) upstream(pos, j) = context_grad[j];
    gcn_backward(tape, upstream, graph, params, grads->params, input_grads);
    for (size_t node = 0; node < graph.node_count(); ++node) {
      const S* g = input_grads.row(node);
      if (node == pos) {
        for (size_t j = 0; j < dim; ++j) grads->placeholder[j] += g[j];
      } else {
        S* dst = grads->input_rows.row(graph.node_word_ids()[node]);
        for (size_t j = 0; j < dim; ++j) dst[j] += g[j];
      }
    }
  }
  return total;
}

struct TrainResult {
  SynModel model;
  std::vector<double> epoch_losses;  // mean loss per target
  size_t total_sentences = 0;
  size_t parse_errors = 0;
  double final_loss = 0.0;
};

// Full SynGCN training run over a CoNLL-U corpus. Progress lines go to
// `log` (stderr in the CLI).
TrainResult train(const std::string& corpus_path, const Vocabulary& vocab,
                  const TrainConfig& config, std::ostream* log = nullptr);

}  // namespace syngcn
