#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "syngcn/rng.hpp"

namespace syngcn {

struct TokenizedSentence;

// Fixed word <-> id map with corpus frequencies. Ids are dense and start at
// 0; the id space never grows once built, and it is the single id space
// shared by all inputs and outputs of the toolkit.
class Vocabulary {
 public:
  static constexpr uint32_t kNoUnk = std::numeric_limits<uint32_t>::max();
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary() = default;

  // Words in id order plus their counts. unk_id = kNoUnk when no unk entry
  // exists (vocabularies taken from pre-trained embedding files).
  Vocabulary(std::vector<std::string> words, std::vector<uint64_t> counts,
             uint32_t unk_id);

  size_t size() const { return words_.size(); }
  uint64_t total_tokens() const { return total_tokens_; }
  uint32_t unk_id() const { return unk_id_; }
  bool has_unk() const { return unk_id_ != kNoUnk; }

  const std::string& word(uint32_t id) const { return words_[id]; }
  const std::vector<std::string>& words() const { return words_; }
  uint64_t count(uint32_t id) const { return counts_[id]; }

  std::optional<uint32_t> find(std::string_view w) const;
  // Lookup falling back to the unk id; requires has_unk().
  uint32_t id_or_unk(std::string_view w) const;

  void save(const std::string& path) const;
  void save(std::ostream& out) const;
  static Vocabulary load(const std::string& path);
  static Vocabulary load(std::istream& in);

  // FNV-1a over the persisted text form; recorded in run manifests.
  uint64_t content_hash() const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, uint32_t> index_;
  std::vector<uint64_t> counts_;
  uint64_t total_tokens_ = 0;
  uint32_t unk_id_ = kNoUnk;
};

struct VocabularyOptions {
  size_t max_size = 150000;  // bound on |V| including the unk entry
  uint64_t min_count = 5;
  bool lowercase = true;
};

struct VocabularyStats {
  size_t sentences = 0;
  size_t parse_errors = 0;
  size_t dropped_words = 0;  // distinct words folded into unk
};

// Counts CoNLL-U token forms and keeps the most frequent ones, ranked by
// count descending with lexicographic tie-break. Dropped occurrences are
// folded into the unk entry, which is always appended last.
Vocabulary build_vocabulary(std::istream& conllu, const VocabularyOptions& opt,
                            VocabularyStats* stats = nullptr);
Vocabulary build_vocabulary_file(const std::string& path,
                                 const VocabularyOptions& opt,
                                 VocabularyStats* stats = nullptr);

// p_keep(w) = min(1, sqrt(t / f(w))) with f(w) = count(w) / total_tokens.
// Words with zero frequency are always kept.
double keep_probability(uint32_t word_id, const Vocabulary& vocab,
                        double threshold);

// Positions of the sentence that serve as prediction targets this pass.
// Each non-unk position is kept independently with keep_probability; the
// sentence graph itself is never thinned.
std::vector<size_t> select_targets(const TokenizedSentence& sentence,
                                   const Vocabulary& vocab, double threshold,
                                   Rng& rng);

}  // namespace syngcn
