#include "syngcn/train_syn.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <thread>

#include "syngcn/common.hpp"
#include "syngcn/noise.hpp"

namespace syngcn {

namespace {

// RNG stream ids. Draws are keyed by (seed, stream, epoch, sentence), so
// they do not depend on batching, thread count or visit order.
constexpr uint64_t kStreamInputInit = 1;
constexpr uint64_t kStreamOutputInit = 2;
constexpr uint64_t kStreamPlaceholderInit = 3;
constexpr uint64_t kStreamParamsInit = 4;
constexpr uint64_t kStreamTargets = 5;
constexpr uint64_t kStreamNegatives = 6;

size_t resolve_threads(const TrainConfig& config) {
  if (config.deterministic) return 1;
  if (config.threads) return config.threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

}  // namespace

SynModel init_syn_model(size_t vocab_size, const TrainConfig& config,
                        LabelSet labels) {
  if (vocab_size == 0) throw std::invalid_argument("empty vocabulary");
  if (config.dim == 0 || config.layers == 0)
    throw std::invalid_argument("model dimensions must be positive");
  SynModel model;
  Rng rng_in = Rng::keyed(config.seed, kStreamInputInit);
  Rng rng_out = Rng::keyed(config.seed, kStreamOutputInit);
  Rng rng_ph = Rng::keyed(config.seed, kStreamPlaceholderInit);
  Rng rng_params = Rng::keyed(config.seed, kStreamParamsInit);
  model.store.input = xavier_init<float>(vocab_size, config.dim, rng_in);
  model.store.output = xavier_init<float>(vocab_size, config.dim, rng_out);
  MatrixF ph = xavier_init<float>(1, config.dim, rng_ph);
  model.placeholder.assign(ph.row(0), ph.row(0) + config.dim);
  model.params = GcnParamsF::xavier(config.gcn(), labels.size(), rng_params);
  model.labels = std::move(labels);
  return model;
}

TrainResult train(const std::string& corpus_path, const Vocabulary& vocab,
                  const TrainConfig& config, std::ostream* log) {
  if (!vocab.has_unk())
    throw DataError("training requires a vocabulary with an unk entry");
  if (config.lr <= 0.0) throw std::invalid_argument("learning rate must be > 0");
  if (config.batch_sentences == 0)
    throw std::invalid_argument("batch size must be > 0");
  if (config.subsample <= 0.0)
    throw std::invalid_argument("subsample threshold must be > 0");

  std::ifstream in(corpus_path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + corpus_path);

  TrainResult result;
  LabelSet labels;
  std::vector<TokenizedSentence> corpus;
  {
    ConlluReader reader(in, config.lowercase);
    while (auto item = reader.next()) {
      if (auto* err = std::get_if<ConlluError>(&*item)) {
        ++result.parse_errors;
        if (log && result.parse_errors <= 10)
          *log << "parse error at line " << err->line_number << ": "
               << err->message << '\n';
        continue;
      }
      const auto& sent = std::get<ConlluSentence>(*item);
      if (sent.size() == 0) continue;
      for (const std::string& l : sent.labels) labels.get_or_add(l);
      corpus.push_back(tokenize(sent, vocab));
    }
  }
  if (corpus.empty()) throw DataError("corpus has no usable sentences");
  labels.add_unknown_label();
  labels.freeze();
  result.total_sentences = corpus.size();

  NoiseTable noise(vocab, config.noise_power);
  SynModel model = init_syn_model(vocab.size(), config, labels);
  if (log)
    *log << "sentences " << corpus.size() << " labels "
         << model.labels.size() << " vocab " << vocab.size() << " params "
         << model.params.parameter_count() << '\n';
  if (config.epochs == 0) {
    // An epochless run exports the initialization unchanged.
    result.model = std::move(model);
    return result;
  }

  const size_t dim = config.dim;
  Adam<float> opt(config.lr);
  const size_t h_input = opt.add_tensor("input_embeddings",
                                        model.store.input.size());
  const size_t h_output = opt.add_tensor("output_embeddings",
                                         model.store.output.size());
  const size_t h_placeholder = opt.add_tensor("placeholder", dim);
  std::vector<size_t> h_gcn;
  for_each_tensor(model.params,
                  [&](const std::string& name, float*, size_t size) {
                    h_gcn.push_back(opt.add_tensor(name, size));
                  });

  const size_t threads = resolve_threads(config);
  std::vector<SynGrads<float>> grads(
      threads, SynGrads<float>(config.gcn(), model.labels.size(), dim));

  // One sentence visit: pick targets, draw negatives, run the encoder and
  // accumulate gradients. Returns (loss, target count).
  auto visit = [&](size_t epoch, size_t si, SynGrads<float>& g,
                   double& loss_out, size_t& targets_out) {
    const TokenizedSentence& sent = corpus[si];
    Rng rng_t = Rng::keyed(config.seed, kStreamTargets, epoch, si);
    std::vector<size_t> targets =
        select_targets(sent, vocab, config.subsample, rng_t);
    if (targets.empty()) return;
    Rng rng_n = Rng::keyed(config.seed, kStreamNegatives, epoch, si);
    std::vector<std::vector<uint32_t>> negatives(targets.size());
    for (size_t t = 0; t < targets.size(); ++t) {
      negatives[t].reserve(config.negatives);
      const uint32_t target_word = sent.token_ids[targets[t]];
      for (size_t n = 0; n < config.negatives; ++n)
        negatives[t].push_back(noise.sample_excluding(rng_n, target_word));
    }
    SentenceGraph graph = build_sentence_graph(sent, labels);
    MatrixF node_inputs(sent.size(), dim);
    for (size_t i = 0; i < sent.size(); ++i) {
      const float* src = model.store.input.row(sent.token_ids[i]);
      std::copy(src, src + dim, node_inputs.row(i));
    }
    loss_out += sentence_loss(graph, node_inputs, model.params,
                              model.placeholder, model.store.output, targets,
                              negatives, &g);
    targets_out += targets.size();
  };

  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    double epoch_loss = 0.0;
    size_t epoch_targets = 0;
    uint64_t epoch_tokens = 0;
    for (size_t b0 = 0; b0 < corpus.size(); b0 += config.batch_sentences) {
      const size_t b1 = std::min(b0 + config.batch_sentences, corpus.size());
      for (auto& g : grads) g.clear();
      std::vector<double> losses(threads, 0.0);
      std::vector<size_t> tcounts(threads, 0);
      if (threads == 1) {
        for (size_t si = b0; si < b1; ++si)
          visit(epoch, si, grads[0], losses[0], tcounts[0]);
      } else {
        const size_t span = b1 - b0;
        const size_t chunk = (span + threads - 1) / threads;
        std::vector<std::thread> pool;
        for (size_t w = 0; w < threads; ++w) {
          const size_t lo = b0 + std::min(span, w * chunk);
          const size_t hi = b0 + std::min(span, (w + 1) * chunk);
          if (lo >= hi) break;
          pool.emplace_back([&, w, lo, hi] {
            for (size_t si = lo; si < hi; ++si)
              visit(epoch, si, grads[w], losses[w], tcounts[w]);
          });
        }
        for (auto& t : pool) t.join();
      }
      for (size_t w = 1; w < threads; ++w) {
        grads[0].merge(grads[w]);
        losses[0] += losses[w];
        tcounts[0] += tcounts[w];
      }
      epoch_loss += losses[0];
      epoch_targets += tcounts[0];
      if (tcounts[0] == 0) continue;

      opt.begin_step();
      opt.update_rows(h_input, model.store.input, grads[0].input_rows);
      opt.update_rows(h_output, model.store.output, grads[0].output_rows);
      opt.update_dense(h_placeholder, model.placeholder.data(),
                       grads[0].placeholder.data(), dim);
      size_t slot = 0;
      std::vector<std::pair<const float*, size_t>> gsrc;
      for_each_tensor(grads[0].params,
                      [&](const std::string&, const float* d, size_t n) {
                        gsrc.emplace_back(d, n);
                      });
      for_each_tensor(model.params,
                      [&](const std::string&, float* d, size_t n) {
                        opt.update_dense(h_gcn[slot], d, gsrc[slot].first, n);
                        ++slot;
                      });
    }
    for (const TokenizedSentence& s : corpus) epoch_tokens += s.size();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    const double mean_loss =
        epoch_targets ? epoch_loss / static_cast<double>(epoch_targets) : 0.0;
    result.epoch_losses.push_back(mean_loss);
    if (log)
      *log << "epoch " << (epoch + 1) << " loss " << mean_loss << " tokens/s "
           << static_cast<uint64_t>(
                  secs > 0 ? static_cast<double>(epoch_tokens) / secs : 0)
           << '\n';
  }
  result.final_loss = result.epoch_losses.back();
  result.model = std::move(model);
  return result;
}

}  // namespace syngcn
