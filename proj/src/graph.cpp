#include "syngcn/graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "syngcn/common.hpp"
#include "syngcn/conllu.hpp"
#include "syngcn/vocab.hpp"

namespace syngcn {

const char* direction_name(EdgeDirection dir) {
  switch (dir) {
    case EdgeDirection::Forward: return "forward";
    case EdgeDirection::Inverse: return "inverse";
    case EdgeDirection::SelfLoop: return "self";
  }
  return "?";
}

LabelSet::LabelSet() {
  labels_.emplace_back(kSelfLabel);
  index_.emplace(kSelfLabel, kSelf);
}

uint32_t LabelSet::get_or_add(std::string_view label) {
  auto it = index_.find(std::string(label));
  if (it != index_.end()) return it->second;
  if (frozen_) {
    auto unk = index_.find(kUnknownLabel);
    if (unk == index_.end())
      throw std::logic_error(
          "label set frozen without an unknown-label entry");
    return unk->second;
  }
  const uint32_t id = static_cast<uint32_t>(labels_.size());
  labels_.emplace_back(label);
  index_.emplace(labels_.back(), id);
  return id;
}

uint32_t LabelSet::id(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it != index_.end()) return it->second;
  auto unk = index_.find(kUnknownLabel);
  if (frozen_ && unk != index_.end()) return unk->second;
  throw std::out_of_range("unknown label: " + std::string(label));
}

bool LabelSet::contains(std::string_view label) const {
  return index_.count(std::string(label)) > 0;
}

namespace {

// Incoming index grouped by destination, preserving edge-list order within
// each group.
void build_incoming_index(const std::vector<Edge>& edges, size_t nodes,
                          std::vector<uint32_t>& offsets,
                          std::vector<uint32_t>& slots) {
  offsets.assign(nodes + 1, 0);
  for (const Edge& e : edges) {
    if (e.src >= nodes || e.dst >= nodes)
      throw std::invalid_argument("edge endpoint out of range");
    ++offsets[e.dst + 1];
  }
  for (size_t i = 0; i < nodes; ++i) offsets[i + 1] += offsets[i];
  slots.resize(edges.size());
  std::vector<uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (uint32_t i = 0; i < edges.size(); ++i)
    slots[cursor[edges[i].dst]++] = i;
}

}  // namespace

SentenceGraph::SentenceGraph(std::vector<uint32_t> node_word_ids,
                             std::vector<Edge> edges)
    : node_word_ids_(std::move(node_word_ids)), edges_(std::move(edges)) {
  build_incoming_index(edges_, node_word_ids_.size(), in_offsets_, in_edges_);
}

SentenceGraph::IncomingRange SentenceGraph::incoming(uint32_t node) const {
  if (node >= node_count())
    throw std::out_of_range("node index out of range");
  return {in_edges_.data() + in_offsets_[node],
          in_edges_.data() + in_offsets_[node + 1]};
}

SentenceGraph build_sentence_graph(const TokenizedSentence& sentence,
                                   LabelSet& labels) {
  const size_t n = sentence.size();
  std::vector<Edge> edges;
  edges.reserve(3 * n);
  for (uint32_t i = 0; i < n; ++i) {
    const int head = sentence.heads[i];
    if (head < 0 || head > static_cast<int>(n))
      throw DataError("head index out of range at token " +
                      std::to_string(i));
    if (head == 0) continue;  // the root has only its self-loop
    const uint32_t h = static_cast<uint32_t>(head - 1);
    const uint32_t label = labels.frozen() ? labels.id(sentence.labels[i])
                                           : labels.get_or_add(
                                                 sentence.labels[i]);
    edges.push_back({h, i, label, EdgeDirection::Forward});
    edges.push_back({i, h, label, EdgeDirection::Inverse});
  }
  for (uint32_t i = 0; i < n; ++i)
    edges.push_back({i, i, LabelSet::kSelf, EdgeDirection::SelfLoop});
  return SentenceGraph(sentence.token_ids, std::move(edges));
}

const char* relation_name(SemanticRelation r) {
  switch (r) {
    case SemanticRelation::Synonym: return "synonym";
    case SemanticRelation::Antonym: return "antonym";
    case SemanticRelation::Hypernym: return "hypernym";
    case SemanticRelation::Hyponym: return "hyponym";
  }
  return "?";
}

SemanticRelation parse_relation(std::string_view name) {
  std::string lower(name);
  for (char& c : lower)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "synonym") return SemanticRelation::Synonym;
  if (lower == "antonym") return SemanticRelation::Antonym;
  if (lower == "hypernym") return SemanticRelation::Hypernym;
  if (lower == "hyponym") return SemanticRelation::Hyponym;
  throw DataError("unknown relation: " + std::string(name));
}

SemanticGraph::SemanticGraph(LabelSet relations, uint32_t vocab_size,
                             std::vector<Edge> relation_edges)
    : relations_(std::move(relations)),
      vocab_size_(vocab_size),
      edges_(std::move(relation_edges)) {
  build_incoming_index(edges_, vocab_size_, in_offsets_, in_edges_);
}

bool SemanticGraph::has_relation_edges(uint32_t word) const {
  return in_offsets_[word + 1] > in_offsets_[word];
}

size_t SemanticGraph::connected_word_count() const {
  size_t n = 0;
  for (uint32_t w = 0; w < vocab_size_; ++w)
    if (has_relation_edges(w)) ++n;
  return n;
}

SentenceGraph::IncomingRange SemanticGraph::incoming(uint32_t word) const {
  if (word >= vocab_size_) throw std::out_of_range("word id out of range");
  return {in_edges_.data() + in_offsets_[word],
          in_edges_.data() + in_offsets_[word + 1]};
}

SentenceGraph SemanticGraph::star(uint32_t word) const {
  std::vector<uint32_t> nodes{word};
  std::unordered_map<uint32_t, uint32_t> local{{word, 0}};
  std::vector<Edge> edges;
  for (uint32_t ei : incoming(word)) {
    const Edge& e = edges_[ei];
    auto [it, inserted] = local.emplace(e.src, nodes.size());
    if (inserted) nodes.push_back(e.src);
    edges.push_back({it->second, 0, e.label, e.dir});
  }
  for (uint32_t i = 0; i < nodes.size(); ++i)
    edges.push_back({i, i, LabelSet::kSelf, EdgeDirection::SelfLoop});
  return SentenceGraph(std::move(nodes), std::move(edges));
}

namespace {

LabelSet semantic_label_set() {
  LabelSet labels;
  labels.get_or_add(relation_name(SemanticRelation::Synonym));
  labels.get_or_add(relation_name(SemanticRelation::Antonym));
  labels.get_or_add(relation_name(SemanticRelation::Hypernym));
  labels.get_or_add(relation_name(SemanticRelation::Hyponym));
  labels.freeze();
  return labels;
}

}  // namespace

SemanticGraph build_semantic_graph(const std::vector<RelationTriple>& pairs,
                                   const Vocabulary& vocab,
                                   SemanticGraphStats* stats) {
  LabelSet labels = semantic_label_set();
  SemanticGraphStats local;
  local.pairs_read = pairs.size();

  std::vector<Edge> edges;
  auto arc = [&](uint32_t u, uint32_t v, SemanticRelation rel) {
    const uint32_t label = labels.id(relation_name(rel));
    edges.push_back({u, v, label, EdgeDirection::Forward});
    edges.push_back({v, u, label, EdgeDirection::Inverse});
  };
  for (const RelationTriple& p : pairs) {
    const auto u = vocab.find(p.word1);
    const auto v = vocab.find(p.word2);
    if (!u || !v) {
      ++local.dropped_oov;
      continue;
    }
    if (*u == *v) {
      ++local.dropped_self;
      continue;
    }
    switch (p.relation) {
      case SemanticRelation::Synonym:
      case SemanticRelation::Antonym:
        arc(*u, *v, p.relation);
        arc(*v, *u, p.relation);
        break;
      case SemanticRelation::Hypernym:
        arc(*u, *v, SemanticRelation::Hypernym);
        arc(*v, *u, SemanticRelation::Hyponym);
        break;
      case SemanticRelation::Hyponym:
        arc(*u, *v, SemanticRelation::Hyponym);
        arc(*v, *u, SemanticRelation::Hypernym);
        break;
    }
  }
  auto key = [](const Edge& e) {
    return std::tuple(e.src, e.dst, e.label, e.dir);
  };
  std::sort(edges.begin(), edges.end(),
            [&](const Edge& a, const Edge& b) { return key(a) < key(b); });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (stats) *stats = local;
  return SemanticGraph(std::move(labels),
                       static_cast<uint32_t>(vocab.size()), std::move(edges));
}

SemanticGraph relation_subset(const SemanticGraph& graph,
                              const std::vector<SemanticRelation>& relations) {
  std::array<bool, 4> keep{};
  for (SemanticRelation r : relations) keep[static_cast<uint32_t>(r)] = true;
  std::vector<Edge> edges;
  for (const Edge& e : graph.relation_edges()) {
    const std::string& name = graph.relations().label(e.label);
    if (keep[static_cast<uint32_t>(parse_relation(name))])
      edges.push_back(e);
  }
  if (edges.empty() && !graph.relation_edges().empty())
    std::cerr << "warning: relation filter removed every relation edge\n";
  return SemanticGraph(graph.relations(), graph.vocab_size(),
                       std::move(edges));
}

namespace {

std::vector<NeighborEdge> sorted_neighborhood(std::vector<NeighborEdge> out) {
  std::sort(out.begin(), out.end(),
            [](const NeighborEdge& a, const NeighborEdge& b) {
              return std::tuple(a.src, a.label, a.dir) <
                     std::tuple(b.src, b.label, b.dir);
            });
  return out;
}

}  // namespace

std::vector<NeighborEdge> neighborhood(const SentenceGraph& graph,
                                       uint32_t node) {
  std::vector<NeighborEdge> out;
  for (uint32_t ei : graph.incoming(node)) {
    const Edge& e = graph.edges()[ei];
    out.push_back({e.src, e.label, e.dir});
  }
  return sorted_neighborhood(std::move(out));
}

std::vector<NeighborEdge> neighborhood(const SemanticGraph& graph,
                                       uint32_t word) {
  std::vector<NeighborEdge> out;
  for (uint32_t ei : graph.incoming(word)) {
    const Edge& e = graph.relation_edges()[ei];
    out.push_back({e.src, e.label, e.dir});
  }
  out.push_back({word, LabelSet::kSelf, EdgeDirection::SelfLoop});
  return sorted_neighborhood(std::move(out));
}

std::vector<RelationTriple> load_lexicon(std::istream& in) {
  std::vector<RelationTriple> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string rel, w1, w2;
    if (!std::getline(row, rel, '\t') || !std::getline(row, w1, '\t') ||
        !std::getline(row, w2, '\t') || rel.empty() || w1.empty() ||
        w2.empty())
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": expected relation<TAB>word1<TAB>word2");
    std::string extra;
    if (std::getline(row, extra, '\t'))
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": too many fields");
    out.push_back({parse_relation(rel), std::move(w1), std::move(w2)});
  }
  return out;
}

std::vector<RelationTriple> load_lexicon_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  return load_lexicon(in);
}

void save_lexicon(const std::vector<RelationTriple>& pairs,
                  std::ostream& out) {
  for (const RelationTriple& p : pairs)
    out << relation_name(p.relation) << '\t' << p.word1 << '\t' << p.word2
        << '\n';
}

void save_lexicon_file(const std::vector<RelationTriple>& pairs,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write lexicon file: " + path);
  save_lexicon(pairs, out);
}

}  // namespace syngcn
