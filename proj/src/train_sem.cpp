#include "syngcn/train_sem.hpp"

#include <chrono>
#include <ostream>
#include <thread>

#include "syngcn/common.hpp"
#include "syngcn/noise.hpp"

namespace syngcn {

namespace {

constexpr uint64_t kStreamSemParamsInit = 10;
constexpr uint64_t kStreamSemNegatives = 11;

size_t resolve_threads(const RetrofitConfig& config) {
  if (config.deterministic) return 1;
  if (config.threads) return config.threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

}  // namespace

RetrofitResult retrofit(const EmbeddingStoreF& init,
                        const SemanticGraph& graph, const Vocabulary& vocab,
                        const RetrofitConfig& config, std::ostream* log) {
  const size_t dim = init.dim();
  if (dim == 0 || init.vocab_size() != vocab.size())
    throw std::invalid_argument("embeddings do not match the vocabulary");
  require_shape(init.output, vocab.size(), dim, "retrofit output init");
  if (graph.vocab_size() != vocab.size())
    throw std::invalid_argument("semantic graph built for another vocabulary");
  if (config.lr <= 0.0) throw std::invalid_argument("learning rate must be > 0");
  if (config.batch_words == 0)
    throw std::invalid_argument("batch size must be > 0");
  if (config.relations.empty())
    throw std::invalid_argument("no relations selected");

  const SemanticGraph used = relation_subset(graph, config.relations);
  const MatrixF& anchors = init.input;  // frozen throughout

  RetrofitResult result;
  result.store.input = anchors;
  result.store.output = init.output;

  std::vector<uint32_t> connected;
  for (uint32_t w = 0; w < used.vocab_size(); ++w)
    if (used.has_relation_edges(w)) connected.push_back(w);
  result.connected_words = connected.size();

  GcnConfig gcn{dim, 1, config.gating, false};
  const size_t num_labels = used.relations().size();
  Rng rng_params = Rng::keyed(config.seed, kStreamSemParamsInit);
  GcnParamsF params = GcnParamsF::xavier(gcn, num_labels, rng_params);

  if (log)
    *log << "connected words " << connected.size() << " of " << vocab.size()
         << " relation edges " << used.relation_edge_count() << '\n';
  if (connected.empty()) {
    if (log) *log << "warning: no relation edges, embeddings pass through\n";
    result.params = std::move(params);
    return result;
  }

  NoiseTable noise(vocab, config.noise_power);
  Adam<float> opt(config.lr);
  const size_t h_output =
      opt.add_tensor("output_embeddings", result.store.output.size());
  std::vector<size_t> h_gcn;
  for_each_tensor(params, [&](const std::string& name, float*, size_t size) {
    h_gcn.push_back(opt.add_tensor(name, size));
  });

  const size_t threads = resolve_threads(config);
  std::vector<SemGrads<float>> grads(threads,
                                     SemGrads<float>(gcn, num_labels, dim));
  const uint32_t antonym_label =
      used.relations().id(relation_name(SemanticRelation::Antonym));

  auto gather_star = [&](uint32_t w, SentenceGraph& star, MatrixF& inputs,
                         std::vector<uint32_t>& repel_rows) {
    star = used.star(w);
    const auto& nodes = star.node_word_ids();
    inputs = MatrixF(nodes.size(), dim);
    for (size_t i = 0; i < nodes.size(); ++i) {
      const float* src = anchors.row(nodes[i]);
      std::copy(src, src + dim, inputs.row(i));
    }
    repel_rows.clear();
    if (config.antonym_repel != 0.0) {
      for (uint32_t ei : star.incoming(0)) {
        const Edge& e = star.edges()[ei];
        if (e.label == antonym_label && e.dir == EdgeDirection::Forward)
          repel_rows.push_back(nodes[e.src]);
      }
    }
  };

  auto visit = [&](size_t epoch, uint32_t w, SemGrads<float>& g,
                   double& loss_out) {
    Rng rng_n = Rng::keyed(config.seed, kStreamSemNegatives, epoch, w);
    std::vector<uint32_t> negatives;
    negatives.reserve(config.negatives);
    for (size_t n = 0; n < config.negatives; ++n)
      negatives.push_back(noise.sample_excluding(rng_n, w));
    SentenceGraph star;
    MatrixF inputs;
    std::vector<uint32_t> repel_rows;
    gather_star(w, star, inputs, repel_rows);
    loss_out += retrofit_word_loss(star, inputs, params, result.store.output,
                                   anchors, w, negatives, config.anchor_weight,
                                   config.antonym_repel, repel_rows, &g);
  };

  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    double epoch_loss = 0.0;
    for (size_t b0 = 0; b0 < connected.size(); b0 += config.batch_words) {
      const size_t b1 = std::min(b0 + config.batch_words, connected.size());
      for (auto& g : grads) g.clear();
      std::vector<double> losses(threads, 0.0);
      if (threads == 1) {
        for (size_t i = b0; i < b1; ++i)
          visit(epoch, connected[i], grads[0], losses[0]);
      } else {
        const size_t span = b1 - b0;
        const size_t chunk = (span + threads - 1) / threads;
        std::vector<std::thread> pool;
        for (size_t w = 0; w < threads; ++w) {
          const size_t lo = b0 + std::min(span, w * chunk);
          const size_t hi = b0 + std::min(span, (w + 1) * chunk);
          if (lo >= hi) break;
          pool.emplace_back([&, w, lo, hi] {
            for (size_t i = lo; i < hi; ++i)
              visit(epoch, connected[i], grads[w], losses[w]);
          });
        }
        for (auto& t : pool) t.join();
      }
      for (size_t w = 1; w < threads; ++w) {
        grads[0].merge(grads[w]);
        losses[0] += losses[w];
      }
      epoch_loss += losses[0];

      opt.begin_step();
      opt.update_rows(h_output, result.store.output, grads[0].output_rows);
      size_t slot = 0;
      std::vector<std::pair<const float*, size_t>> gsrc;
      for_each_tensor(grads[0].params,
                      [&](const std::string&, const float* d, size_t n) {
                        gsrc.emplace_back(d, n);
                      });
      for_each_tensor(params, [&](const std::string&, float* d, size_t n) {
        opt.update_dense(h_gcn[slot], d, gsrc[slot].first, n);
        ++slot;
      });
    }
    const double mean_loss = epoch_loss / static_cast<double>(connected.size());
    result.epoch_losses.push_back(mean_loss);
    if (log) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        started)
              .count();
      *log << "epoch " << (epoch + 1) << " loss " << mean_loss << " words/s "
           << static_cast<uint64_t>(
                  secs > 0 ? static_cast<double>(connected.size()) / secs : 0)
           << '\n';
    }
  }
  if (!result.epoch_losses.empty()) result.final_loss = result.epoch_losses.back();

  // Export: encoded vectors for connected words, pass-through for the rest.
  SentenceGraph star;
  MatrixF inputs;
  std::vector<uint32_t> repel_rows;
  for (uint32_t w : connected) {
    gather_star(w, star, inputs, repel_rows);
    MatrixF hidden = gcn_forward(inputs, star, params);
    std::copy(hidden.row(0), hidden.row(0) + dim, result.store.input.row(w));
  }
  result.params = std::move(params);
  return result;
}

}  // namespace syngcn
