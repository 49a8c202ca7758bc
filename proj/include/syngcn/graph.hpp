#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace syngcn {

class Vocabulary;
struct TokenizedSentence;

enum class EdgeDirection : uint8_t { Forward = 0, Inverse = 1, SelfLoop = 2 };
constexpr int kNumDirections = 3;

const char* direction_name(EdgeDirection dir);

struct Edge {
  uint32_t src;
  uint32_t dst;
  uint32_t label;
  EdgeDirection dir;

  bool operator==(const Edge&) const = default;
};

// Ordered label inventory. Id 0 is always the reserved "self" label used by
// self-loop edges. A pipeline that must tolerate labels unseen during its
// discovery pass adds the reserved unknown label before freezing; lookups
// after freeze map unseen labels onto it.
class LabelSet {
 public:
  static constexpr uint32_t kSelf = 0;
  static constexpr const char* kSelfLabel = "self";
  static constexpr const char* kUnknownLabel = "unk_label";

  LabelSet();

  // Insert-or-get while unfrozen. Once frozen, unseen labels resolve to the
  // unknown label; it is an error if none was registered.
  uint32_t get_or_add(std::string_view label);
  uint32_t id(std::string_view label) const;  // same resolution, never inserts
  bool contains(std::string_view label) const;

  void add_unknown_label() { get_or_add(kUnknownLabel); }
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  size_t size() const { return labels_.size(); }
  const std::string& label(uint32_t id) const { return labels_[id]; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, uint32_t> index_;
  bool frozen_ = false;
};

// An edge as seen from the node it points into.
struct NeighborEdge {
  uint32_t src;
  uint32_t label;
  EdgeDirection dir;

  bool operator==(const NeighborEdge&) const = default;
};

// One sentence's dependency graph with direction-augmented labeled edges.
// Immutable after construction; the incoming index groups edges by
// destination while preserving edge-list order, which is the order the
// encoder accumulates messages in.
class SentenceGraph {
 public:
  SentenceGraph() = default;
  SentenceGraph(std::vector<uint32_t> node_word_ids, std::vector<Edge> edges);

  size_t node_count() const { return node_word_ids_.size(); }
  size_t edge_count() const { return edges_.size(); }
  const std::vector<uint32_t>& node_word_ids() const { return node_word_ids_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Edge indices flowing into `node`, in edge-list order.
  struct IncomingRange {
    const uint32_t* begin_;
    const uint32_t* end_;
    const uint32_t* begin() const { return begin_; }
    const uint32_t* end() const { return end_; }
    size_t size() const { return static_cast<size_t>(end_ - begin_); }
  };
  IncomingRange incoming(uint32_t node) const;

 private:
  std::vector<uint32_t> node_word_ids_;
  std::vector<Edge> edges_;
  std::vector<uint32_t> in_offsets_;  // node -> first slot in in_edges_
  std::vector<uint32_t> in_edges_;    // edge indices grouped by dst
};

// Emits, for each non-root token with head h, a forward edge head->token and
// its inverse, then one self-loop per node. Unseen dependency labels are
// added to `labels` while it is unfrozen.
SentenceGraph build_sentence_graph(const TokenizedSentence& sentence,
                                   LabelSet& labels);

enum class SemanticRelation : uint32_t {
  Synonym,
  Antonym,
  Hypernym,
  Hyponym,
};

const char* relation_name(SemanticRelation r);
SemanticRelation parse_relation(std::string_view name);  // case-insensitive

struct RelationTriple {
  SemanticRelation relation;
  std::string word1, word2;
};

// Vocabulary-level graph whose edges carry semantic relation types.
// Synonym/antonym pairs are symmetric, hypernym pairs mirror as hyponym
// edges, and every vocabulary word carries a self-loop.
class SemanticGraph {
 public:
  SemanticGraph() = default;
  SemanticGraph(LabelSet relations, uint32_t vocab_size,
                std::vector<Edge> relation_edges);

  const LabelSet& relations() const { return relations_; }
  uint32_t vocab_size() const { return vocab_size_; }
  // Relation edges only; self-loops are implicit on every node.
  const std::vector<Edge>& relation_edges() const { return edges_; }
  size_t relation_edge_count() const { return edges_.size(); }

  bool has_relation_edges(uint32_t word) const;
  size_t connected_word_count() const;

  // Incoming relation-edge indices for `word`, in edge-list order.
  SentenceGraph::IncomingRange incoming(uint32_t word) const;

  // Local 1-hop graph for encoding `word`: node 0 is the word itself,
  // followed by its in-neighbors in edge order; all nodes keep self-loops.
  SentenceGraph star(uint32_t word) const;

 private:
  LabelSet relations_;
  uint32_t vocab_size_ = 0;
  std::vector<Edge> edges_;
  std::vector<uint32_t> in_offsets_;
  std::vector<uint32_t> in_edges_;
};

struct SemanticGraphStats {
  size_t pairs_read = 0;
  size_t dropped_oov = 0;
  size_t dropped_self = 0;
};

SemanticGraph build_semantic_graph(const std::vector<RelationTriple>& pairs,
                                   const Vocabulary& vocab,
                                   SemanticGraphStats* stats = nullptr);

// Graph filtered to the chosen relations; self-loops are kept. Emits a
// warning on stderr when no relation edges survive.
SemanticGraph relation_subset(const SemanticGraph& graph,
                              const std::vector<SemanticRelation>& relations);

// All edges pointing into `node`, self-loop included, sorted by
// (src, label, direction).
std::vector<NeighborEdge> neighborhood(const SentenceGraph& graph,
                                       uint32_t node);
std::vector<NeighborEdge> neighborhood(const SemanticGraph& graph,
                                       uint32_t word);

// Lexicon file: one "relation<TAB>word1<TAB>word2" per line, '#' comments.
std::vector<RelationTriple> load_lexicon(std::istream& in);
std::vector<RelationTriple> load_lexicon_file(const std::string& path);
void save_lexicon(const std::vector<RelationTriple>& pairs, std::ostream& out);
void save_lexicon_file(const std::vector<RelationTriple>& pairs,
                       const std::string& path);

}  // namespace syngcn
