#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "syngcn/common.hpp"
#include "syngcn/eval.hpp"
#include "syngcn/io.hpp"
#include "syngcn/train_sem.hpp"
#include "syngcn/train_syn.hpp"

namespace py = pybind11;
using namespace syngcn;

namespace {

py::array_t<float> to_numpy(const MatrixF& m) {
  py::array_t<float> out({m.rows(), m.cols()});
  std::copy(m.data(), m.data() + m.size(), out.mutable_data());
  return out;
}

MatrixF from_numpy(const py::array_t<float, py::array::c_style |
                                                py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  MatrixF m(static_cast<size_t>(a.shape(0)), static_cast<size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + m.size(), m.data());
  return m;
}

Vocabulary word_list_vocab(const std::vector<std::string>& words) {
  return Vocabulary(words, std::vector<uint64_t>(words.size(), 1),
                    Vocabulary::kNoUnk);
}

std::vector<RelationTriple> to_triples(
    const std::vector<std::tuple<std::string, std::string, std::string>>&
        rows) {
  std::vector<RelationTriple> out;
  out.reserve(rows.size());
  for (const auto& [rel, w1, w2] : rows)
    out.push_back({parse_relation(rel), w1, w2});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GCN-based word embedding toolkit";

  py::register_exception<DataError>(m, "DataError");

  py::class_<Vocabulary>(m, "Vocabulary")
      .def(py::init([](const std::vector<std::string>& words,
                       const std::vector<uint64_t>& counts) {
             return Vocabulary(words, counts, Vocabulary::kNoUnk);
           }),
           py::arg("words"), py::arg("counts"))
      .def("__len__", &Vocabulary::size)
      .def_property_readonly("words", &Vocabulary::words)
      .def_property_readonly("total_tokens", &Vocabulary::total_tokens)
      .def_property_readonly("has_unk", &Vocabulary::has_unk)
      .def("word", &Vocabulary::word, py::arg("id"))
      .def("count", &Vocabulary::count, py::arg("id"))
      .def(
          "find",
          [](const Vocabulary& v, const std::string& w) -> py::object {
            const auto id = v.find(w);
            return id ? py::cast(*id) : py::none();
          },
          py::arg("word"))
      .def("content_hash", &Vocabulary::content_hash)
      .def("save",
           [](const Vocabulary& v, const std::string& path) { v.save(path); },
           py::arg("path"))
      .def_static(
          "load",
          [](const std::string& path) { return Vocabulary::load(path); },
          py::arg("path"));

  m.def(
      "build_vocabulary",
      [](const std::string& corpus_path, size_t max_vocab, uint64_t min_count,
         bool lowercase) {
        VocabularyOptions opt;
        opt.max_size = max_vocab;
        opt.min_count = min_count;
        opt.lowercase = lowercase;
        VocabularyStats stats;
        Vocabulary vocab = build_vocabulary_file(corpus_path, opt, &stats);
        py::dict info;
        info["sentences"] = stats.sentences;
        info["parse_errors"] = stats.parse_errors;
        info["dropped_words"] = stats.dropped_words;
        return py::make_tuple(vocab, info);
      },
      py::arg("corpus_path"), py::arg("max_vocab") = 150000,
      py::arg("min_count") = 5, py::arg("lowercase") = true,
      "Count a CoNLL-U corpus into a Vocabulary; returns (vocab, stats)");

  m.def(
      "train",
      [](const std::string& corpus_path, const Vocabulary& vocab, size_t dim,
         double lr, size_t epochs, size_t negatives, size_t batch,
         double subsample, size_t layers, bool gating, double noise_power,
         uint64_t seed, bool deterministic, size_t threads,
         const std::string& export_kind, bool lowercase) {
        TrainConfig cfg;
        cfg.dim = dim;
        cfg.lr = lr;
        cfg.epochs = epochs;
        cfg.negatives = negatives;
        cfg.batch_sentences = batch;
        cfg.subsample = subsample;
        cfg.layers = layers;
        cfg.gating = gating;
        cfg.noise_power = noise_power;
        cfg.seed = seed;
        cfg.deterministic = deterministic;
        cfg.threads = threads;
        cfg.lowercase = lowercase;
        if (export_kind == "input")
          cfg.export_kind = ExportKind::Input;
        else if (export_kind == "output")
          cfg.export_kind = ExportKind::Output;
        else if (export_kind == "mean")
          cfg.export_kind = ExportKind::Mean;
        else
          throw std::invalid_argument("export must be input, output or mean");
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = train(corpus_path, vocab, cfg);
        }
        py::dict info;
        info["epoch_losses"] = res.epoch_losses;
        info["final_loss"] = res.final_loss;
        info["sentences"] = res.total_sentences;
        info["parse_errors"] = res.parse_errors;
        return py::make_tuple(
            to_numpy(export_embeddings(res.model.store, cfg.export_kind)),
            info);
      },
      py::arg("corpus_path"), py::arg("vocab"), py::arg("dim") = 300,
      py::arg("lr") = 0.001, py::arg("epochs") = 5, py::arg("negatives") = 5,
      py::arg("batch") = 128, py::arg("subsample") = 1e-4,
      py::arg("layers") = 1, py::arg("gating") = true,
      py::arg("noise_power") = 0.75, py::arg("seed") = 1,
      py::arg("deterministic") = false, py::arg("threads") = 0,
      py::arg("export") = "input", py::arg("lowercase") = true,
      "SynGCN training; returns (vectors, info)");

  m.def(
      "retrofit",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
             vectors,
         const std::vector<std::string>& words,
         const std::vector<std::tuple<std::string, std::string, std::string>>&
             triples,
         const std::vector<std::string>& relations, double lr, size_t epochs,
         size_t negatives, size_t batch, double anchor_weight,
         double antonym_repel, bool gating, double noise_power, uint64_t seed,
         bool deterministic, size_t threads) {
        Vocabulary vocab = word_list_vocab(words);
        MatrixF init = from_numpy(vectors);
        require_shape(init, vocab.size(), init.cols(), "retrofit vectors");
        SemanticGraphStats stats;
        SemanticGraph graph =
            build_semantic_graph(to_triples(triples), vocab, &stats);
        RetrofitConfig cfg;
        cfg.lr = lr;
        cfg.epochs = epochs;
        cfg.negatives = negatives;
        cfg.batch_words = batch;
        cfg.anchor_weight = anchor_weight;
        cfg.antonym_repel = antonym_repel;
        cfg.gating = gating;
        cfg.noise_power = noise_power;
        cfg.seed = seed;
        cfg.deterministic = deterministic;
        cfg.threads = threads;
        cfg.relations.clear();
        for (const std::string& r : relations)
          cfg.relations.push_back(parse_relation(r));
        EmbeddingStoreF store{init, init};
        RetrofitResult res;
        {
          py::gil_scoped_release release;
          res = retrofit(store, graph, vocab, cfg);
        }
        py::dict info;
        info["epoch_losses"] = res.epoch_losses;
        info["final_loss"] = res.final_loss;
        info["connected_words"] = res.connected_words;
        info["pairs_read"] = stats.pairs_read;
        info["dropped_oov"] = stats.dropped_oov;
        info["dropped_self"] = stats.dropped_self;
        return py::make_tuple(to_numpy(res.store.input), info);
      },
      py::arg("vectors"), py::arg("words"), py::arg("triples"),
      py::arg("relations") =
          std::vector<std::string>{"synonym", "antonym", "hypernym",
                                   "hyponym"},
      py::arg("lr") = 0.001, py::arg("epochs") = 5, py::arg("negatives") = 5,
      py::arg("batch") = 128, py::arg("anchor_weight") = 1.0,
      py::arg("antonym_repel") = 0.0, py::arg("gating") = true,
      py::arg("noise_power") = 0.75, py::arg("seed") = 1,
      py::arg("deterministic") = false, py::arg("threads") = 0,
      "SemGCN retrofitting; returns (vectors, info)");

  m.def(
      "eval_similarity",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
             vectors,
         const std::vector<std::string>& words,
         const std::vector<std::tuple<std::string, std::string, double>>&
             rows) {
        Vocabulary vocab = word_list_vocab(words);
        MatrixF m = from_numpy(vectors);
        SimilarityDataset ds;
        for (const auto& [w1, w2, gold] : rows) ds.rows.push_back({w1, w2, gold});
        SimilarityResult res = eval_similarity(m, vocab, ds);
        py::dict out;
        out["spearman"] = res.rho;
        out["coverage"] = res.coverage;
        out["pairs_used"] = res.rows_used;
        out["pairs_skipped"] = res.rows_skipped;
        return out;
      },
      py::arg("vectors"), py::arg("words"), py::arg("rows"));

  m.def(
      "eval_analogy",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
             vectors,
         const std::vector<std::string>& words,
         const std::vector<std::tuple<std::string, std::string, std::string,
                                      std::string>>& quads,
         const std::string& method) {
        Vocabulary vocab = word_list_vocab(words);
        MatrixF m = from_numpy(vectors);
        std::vector<AnalogyQuad> qs;
        for (const auto& [a, b, c, d] : quads) qs.push_back({a, b, c, d});
        AnalogyMethod am;
        if (method == "add")
          am = AnalogyMethod::CosAdd;
        else if (method == "mul")
          am = AnalogyMethod::CosMul;
        else
          throw std::invalid_argument("method must be add or mul");
        AnalogyResult res = eval_analogy(m, vocab, qs, am);
        py::dict out;
        out["accuracy"] = res.accuracy;
        out["quads_used"] = res.quads_used;
        out["quads_skipped"] = res.quads_skipped;
        return out;
      },
      py::arg("vectors"), py::arg("words"), py::arg("quads"),
      py::arg("method") = "add");

  m.def(
      "nearest_neighbors",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>&
             vectors,
         const std::vector<std::string>& words, const std::string& word,
         size_t k) {
        Vocabulary vocab = word_list_vocab(words);
        MatrixF m = from_numpy(vectors);
        std::vector<std::pair<std::string, double>> out;
        for (const Neighbor& n : nearest_neighbors(m, vocab, word, k))
          out.emplace_back(n.word, n.cosine);
        return out;
      },
      py::arg("vectors"), py::arg("words"), py::arg("word"),
      py::arg("k") = 10);

  m.def(
      "save_embeddings",
      [](const std::string& path,
         const py::array_t<float, py::array::c_style | py::array::forcecast>&
             vectors,
         const std::vector<std::string>& words) {
        save_embeddings(from_numpy(vectors), word_list_vocab(words), path);
      },
      py::arg("path"), py::arg("vectors"), py::arg("words"));

  m.def(
      "load_embeddings",
      [](const std::string& path) {
        PretrainedEmbeddings pre = load_pretrained_file(path);
        return py::make_tuple(to_numpy(pre.store.input), pre.vocab.words());
      },
      py::arg("path"), "Returns (vectors, words)");
}
