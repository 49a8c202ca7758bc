#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "syngcn/common.hpp"
#include "syngcn/eval.hpp"
#include "syngcn/io.hpp"
#include "syngcn/train_sem.hpp"
#include "syngcn/train_syn.hpp"

namespace {

using namespace syngcn;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_metrics(const std::map<std::string, std::string>& metrics) {
  for (const auto& [k, v] : metrics) std::cout << k << '=' << v << '\n';
}

size_t env_threads() {
  const char* s = std::getenv("SYNGCN_THREADS");
  if (!s || !*s) return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(s, &end, 10);
  if (end == s || *end) throw DataError("SYNGCN_THREADS is not a number");
  return static_cast<size_t>(v);
}

ExportKind parse_export(const std::string& s) {
  if (s == "input") return ExportKind::Input;
  if (s == "output") return ExportKind::Output;
  if (s == "mean") return ExportKind::Mean;
  throw CLI::ValidationError("--export", "must be input, output or mean");
}

std::vector<SemanticRelation> parse_relations(const std::string& csv) {
  std::vector<SemanticRelation> out;
  if (csv == "all" || csv.empty())
    return {SemanticRelation::Synonym, SemanticRelation::Antonym,
            SemanticRelation::Hypernym, SemanticRelation::Hyponym};
  size_t pos = 0;
  while (pos <= csv.size()) {
    const size_t comma = csv.find(',', pos);
    const std::string item =
        csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (item.empty())
      throw CLI::ValidationError("--relations", "empty relation name");
    try {
      out.push_back(parse_relation(item));
    } catch (const DataError&) {
      throw CLI::ValidationError("--relations", "unknown relation " + item);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

int cmd_vocab(const std::string& corpus, size_t max_vocab, uint64_t min_count,
              bool lowercase, const std::string& out) {
  Timer timer;
  VocabularyOptions opt;
  opt.max_size = max_vocab;
  opt.min_count = min_count;
  opt.lowercase = lowercase;
  VocabularyStats stats;
  Vocabulary vocab = build_vocabulary_file(corpus, opt, &stats);
  vocab.save(out);

  std::map<std::string, std::string> metrics{
      {"vocab_size", std::to_string(vocab.size())},
      {"total_tokens", std::to_string(vocab.total_tokens())},
      {"sentences", std::to_string(stats.sentences)},
      {"parse_errors", std::to_string(stats.parse_errors)},
      {"dropped_words", std::to_string(stats.dropped_words)},
  };
  print_metrics(metrics);

  RunManifest m;
  m.command = "vocab";
  m.flags = {{"corpus", corpus},
             {"max-vocab", std::to_string(max_vocab)},
             {"min-count", std::to_string(min_count)},
             {"lowercase", lowercase ? "true" : "false"},
             {"out", out}};
  m.vocabulary_hash = vocab.content_hash();
  m.input_sizes[corpus] = file_size_bytes(corpus);
  m.wall_clock_seconds = timer.seconds();
  m.metrics = metrics;
  m.save(out + ".manifest.json");
  return 0;
}

int cmd_train(const std::string& corpus, const std::string& vocab_path,
              const TrainConfig& config, const std::string& export_name,
              const std::string& out, const std::string& save_model) {
  Timer timer;
  Vocabulary vocab = Vocabulary::load(vocab_path);
  TrainResult result = train(corpus, vocab, config, &std::cerr);
  MatrixF vectors = export_embeddings(result.model.store, config.export_kind);
  save_embeddings(vectors, vocab, out);
  if (!save_model.empty())
    save_checkpoint(result.model.params, result.model.labels,
                    result.model.placeholder, save_model);

  std::map<std::string, std::string> metrics{
      {"final_loss", fmt(result.final_loss)},
      {"sentences", std::to_string(result.total_sentences)},
      {"parse_errors", std::to_string(result.parse_errors)},
      {"vocab_size", std::to_string(vocab.size())},
  };
  print_metrics(metrics);

  RunManifest m;
  m.command = "train";
  m.flags = {{"corpus", corpus},
             {"vocab", vocab_path},
             {"dim", std::to_string(config.dim)},
             {"lr", fmt(config.lr)},
             {"epochs", std::to_string(config.epochs)},
             {"negatives", std::to_string(config.negatives)},
             {"batch", std::to_string(config.batch_sentences)},
             {"subsample", fmt(config.subsample)},
             {"layers", std::to_string(config.layers)},
             {"gating", config.gating ? "true" : "false"},
             {"noise-power", fmt(config.noise_power)},
             {"lowercase", config.lowercase ? "true" : "false"},
             {"deterministic", config.deterministic ? "true" : "false"},
             {"export", export_name},
             {"out", out}};
  if (!save_model.empty()) m.flags["save-model"] = save_model;
  m.vocabulary_hash = vocab.content_hash();
  m.input_sizes[corpus] = file_size_bytes(corpus);
  m.input_sizes[vocab_path] = file_size_bytes(vocab_path);
  m.seed = config.seed;
  m.wall_clock_seconds = timer.seconds();
  m.metrics = metrics;
  m.save(out + ".manifest.json");
  return 0;
}

int cmd_retrofit(const std::string& embeddings_path,
                 const std::string& lexicon_path, RetrofitConfig config,
                 const std::string& relations_csv, const std::string& out,
                 const std::string& save_model) {
  Timer timer;
  PretrainedEmbeddings pre = load_pretrained_file(embeddings_path);
  std::vector<RelationTriple> pairs = load_lexicon_file(lexicon_path);
  SemanticGraphStats stats;
  SemanticGraph graph = build_semantic_graph(pairs, pre.vocab, &stats);
  RetrofitResult result = retrofit(pre.store, graph, pre.vocab, config,
                                   &std::cerr);
  save_embeddings(result.store.input, pre.vocab, out);
  if (!save_model.empty())
    save_checkpoint(result.params, graph.relations(), {}, save_model);

  std::map<std::string, std::string> metrics{
      {"final_loss", fmt(result.final_loss)},
      {"connected_words", std::to_string(result.connected_words)},
      {"pairs_read", std::to_string(stats.pairs_read)},
      {"dropped_oov", std::to_string(stats.dropped_oov)},
      {"dropped_self", std::to_string(stats.dropped_self)},
      {"vocab_size", std::to_string(pre.vocab.size())},
  };
  print_metrics(metrics);

  RunManifest m;
  m.command = "retrofit";
  m.flags = {{"embeddings", embeddings_path},
             {"lexicon", lexicon_path},
             {"relations", relations_csv},
             {"lr", fmt(config.lr)},
             {"epochs", std::to_string(config.epochs)},
             {"negatives", std::to_string(config.negatives)},
             {"batch", std::to_string(config.batch_words)},
             {"lambda", fmt(config.anchor_weight)},
             {"antonym-repel", fmt(config.antonym_repel)},
             {"noise-power", fmt(config.noise_power)},
             {"gating", config.gating ? "true" : "false"},
             {"deterministic", config.deterministic ? "true" : "false"},
             {"out", out}};
  if (!save_model.empty()) m.flags["save-model"] = save_model;
  m.vocabulary_hash = pre.vocab.content_hash();
  m.input_sizes[embeddings_path] = file_size_bytes(embeddings_path);
  m.input_sizes[lexicon_path] = file_size_bytes(lexicon_path);
  m.seed = config.seed;
  m.wall_clock_seconds = timer.seconds();
  m.metrics = metrics;
  m.save(out + ".manifest.json");
  return 0;
}

int cmd_eval_sim(const std::string& embeddings_path,
                 const std::string& dataset_path) {
  PretrainedEmbeddings pre = load_pretrained_file(embeddings_path);
  SimilarityDataset ds = load_similarity_dataset_file(dataset_path);
  SimilarityResult res = eval_similarity(pre.store.input, pre.vocab, ds);
  print_metrics({{"spearman", fmt(res.rho)},
                 {"coverage", fmt(res.coverage)},
                 {"pairs_used", std::to_string(res.rows_used)},
                 {"pairs_skipped", std::to_string(res.rows_skipped)}});
  return 0;
}

int cmd_eval_analogy(const std::string& embeddings_path,
                     const std::string& dataset_path,
                     const std::string& method_name) {
  AnalogyMethod method;
  if (method_name == "add")
    method = AnalogyMethod::CosAdd;
  else if (method_name == "mul")
    method = AnalogyMethod::CosMul;
  else
    throw CLI::ValidationError("--method", "must be add or mul");
  PretrainedEmbeddings pre = load_pretrained_file(embeddings_path);
  std::vector<AnalogyQuad> quads = load_analogy_dataset_file(dataset_path);
  AnalogyResult res = eval_analogy(pre.store.input, pre.vocab, quads, method);
  print_metrics({{"accuracy", fmt(res.accuracy)},
                 {"quads_used", std::to_string(res.quads_used)},
                 {"quads_skipped", std::to_string(res.quads_skipped)}});
  return 0;
}

int cmd_nn(const std::string& embeddings_path, const std::string& word,
           size_t k) {
  PretrainedEmbeddings pre = load_pretrained_file(embeddings_path);
  const auto neighbors = nearest_neighbors(pre.store.input, pre.vocab, word, k);
  for (const Neighbor& n : neighbors)
    std::cout << n.word << '\t' << fmt(n.cosine) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GCN-based word embedding toolkit"};
  app.require_subcommand(1);

  // vocab
  auto* vocab_cmd = app.add_subcommand(
      "vocab", "Build a vocabulary from a CoNLL-U corpus");
  std::string v_corpus, v_out;
  size_t v_max = 150000;
  uint64_t v_min = 5;
  bool v_no_lower = false;
  vocab_cmd->add_option("--corpus", v_corpus, "CoNLL-U corpus")->required();
  vocab_cmd->add_option("--max-vocab", v_max,
                        "Vocabulary size bound, unk included");
  vocab_cmd->add_option("--min-count", v_min, "Minimum word frequency");
  vocab_cmd->add_flag("--no-lowercase", v_no_lower, "Keep original case");
  vocab_cmd->add_option("--out", v_out, "Vocabulary output path")->required();

  // train
  auto* train_cmd = app.add_subcommand(
      "train", "Train SynGCN embeddings over dependency parses");
  std::string t_corpus, t_vocab, t_out, t_export = "input", t_save_model;
  TrainConfig t_cfg;
  bool t_no_lower = false, t_no_gating = false;
  train_cmd->add_option("--corpus", t_corpus, "CoNLL-U corpus")->required();
  train_cmd->add_option("--vocab", t_vocab, "Vocabulary file")->required();
  train_cmd->add_option("--dim", t_cfg.dim, "Embedding dimension");
  train_cmd->add_option("--lr", t_cfg.lr, "Adam learning rate");
  train_cmd->add_option("--epochs", t_cfg.epochs, "Training epochs");
  train_cmd->add_option("--negatives", t_cfg.negatives,
                        "Negative samples per target");
  train_cmd->add_option("--batch", t_cfg.batch_sentences,
                        "Sentences per optimizer step");
  train_cmd->add_option("--subsample", t_cfg.subsample,
                        "Frequent-word subsampling threshold");
  train_cmd->add_option("--layers", t_cfg.layers, "Graph convolution layers");
  train_cmd->add_option("--noise-power", t_cfg.noise_power,
                        "Noise distribution exponent");
  train_cmd->add_option("--seed", t_cfg.seed, "RNG seed");
  train_cmd->add_option("--threads", t_cfg.threads,
                        "Worker threads (0 = all cores)");
  train_cmd->add_flag("--deterministic", t_cfg.deterministic,
                      "Bit-reproducible single-thread run");
  train_cmd->add_flag("--no-gating", t_no_gating, "Disable edge gates");
  train_cmd->add_flag("--no-lowercase", t_no_lower, "Keep original case");
  train_cmd->add_option("--export", t_export,
                        "Which vectors to export: input, output or mean");
  train_cmd->add_option("--save-model", t_save_model,
                        "Also write a binary checkpoint here");
  train_cmd->add_option("--out", t_out, "Embeddings output path")->required();

  // retrofit
  auto* retro_cmd = app.add_subcommand(
      "retrofit", "SemGCN: specialize embeddings with semantic relations");
  std::string r_embeddings, r_lexicon, r_out, r_relations = "all",
              r_save_model;
  RetrofitConfig r_cfg;
  bool r_no_gating = false;
  retro_cmd->add_option("--embeddings", r_embeddings,
                        "Pre-trained embeddings (word2vec text format)")
      ->required();
  retro_cmd->add_option("--lexicon", r_lexicon, "Relation triples file")
      ->required();
  retro_cmd->add_option("--relations", r_relations,
                        "Comma-separated subset of "
                        "synonym,antonym,hypernym,hyponym (or 'all')");
  retro_cmd->add_option("--lr", r_cfg.lr, "Adam learning rate");
  retro_cmd->add_option("--epochs", r_cfg.epochs, "Training epochs");
  retro_cmd->add_option("--negatives", r_cfg.negatives,
                        "Negative samples per word");
  retro_cmd->add_option("--batch", r_cfg.batch_words,
                        "Words per optimizer step");
  retro_cmd->add_option("--lambda", r_cfg.anchor_weight,
                        "Anchor strength toward the initialization");
  retro_cmd->add_option("--antonym-repel", r_cfg.antonym_repel,
                        "Cosine repulsion from antonym anchors");
  retro_cmd->add_option("--noise-power", r_cfg.noise_power,
                        "Noise distribution exponent");
  retro_cmd->add_option("--seed", r_cfg.seed, "RNG seed");
  retro_cmd->add_option("--threads", r_cfg.threads,
                        "Worker threads (0 = all cores)");
  retro_cmd->add_flag("--deterministic", r_cfg.deterministic,
                      "Bit-reproducible single-thread run");
  retro_cmd->add_flag("--no-gating", r_no_gating, "Disable edge gates");
  retro_cmd->add_option("--save-model", r_save_model,
                        "Also write a binary checkpoint here");
  retro_cmd->add_option("--out", r_out, "Embeddings output path")->required();

  // eval-sim
  auto* sim_cmd = app.add_subcommand(
      "eval-sim", "Word similarity: Spearman against a gold dataset");
  std::string s_embeddings, s_dataset;
  sim_cmd->add_option("--embeddings", s_embeddings, "Embeddings file")
      ->required();
  sim_cmd->add_option("--dataset", s_dataset,
                      "word1<TAB>word2<TAB>score lines")
      ->required();

  // eval-analogy
  auto* ana_cmd = app.add_subcommand(
      "eval-analogy", "Analogy accuracy over a:b :: c:d questions");
  std::string a_embeddings, a_dataset, a_method = "add";
  ana_cmd->add_option("--embeddings", a_embeddings, "Embeddings file")
      ->required();
  ana_cmd->add_option("--dataset", a_dataset, "Four words per line")
      ->required();
  ana_cmd->add_option("--method", a_method, "add (3CosAdd) or mul (3CosMul)");

  // nn
  auto* nn_cmd =
      app.add_subcommand("nn", "Nearest neighbors of a word by cosine");
  std::string n_embeddings, n_word;
  size_t n_k = 10;
  nn_cmd->add_option("--embeddings", n_embeddings, "Embeddings file")
      ->required();
  nn_cmd->add_option("--word", n_word, "Query word")->required();
  nn_cmd->add_option("--k", n_k, "Neighbor count");

  try {
    app.parse(argc, argv);

    if (*vocab_cmd)
      return cmd_vocab(v_corpus, v_max, v_min, !v_no_lower, v_out);
    if (*train_cmd) {
      t_cfg.lowercase = !t_no_lower;
      t_cfg.gating = !t_no_gating;
      t_cfg.export_kind = parse_export(t_export);
      if (t_cfg.threads == 0) t_cfg.threads = env_threads();
      return cmd_train(t_corpus, t_vocab, t_cfg, t_export, t_out,
                       t_save_model);
    }
    if (*retro_cmd) {
      r_cfg.gating = !r_no_gating;
      r_cfg.relations = parse_relations(r_relations);
      if (r_cfg.threads == 0) r_cfg.threads = env_threads();
      return cmd_retrofit(r_embeddings, r_lexicon, r_cfg, r_relations, r_out,
                          r_save_model);
    }
    if (*sim_cmd) return cmd_eval_sim(s_embeddings, s_dataset);
    if (*ana_cmd) return cmd_eval_analogy(a_embeddings, a_dataset, a_method);
    if (*nn_cmd) return cmd_nn(n_embeddings, n_word, n_k);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const syngcn::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
