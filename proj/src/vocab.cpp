#include "syngcn/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "syngcn/common.hpp"
#include "syngcn/conllu.hpp"

namespace syngcn {

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::vector<uint64_t> counts, uint32_t unk_id)
    : words_(std::move(words)), counts_(std::move(counts)), unk_id_(unk_id) {
  if (words_.size() != counts_.size())
    throw std::invalid_argument("vocabulary: words/counts length mismatch");
  if (unk_id_ != kNoUnk && unk_id_ >= words_.size())
    throw std::invalid_argument("vocabulary: unk id out of range");
  index_.reserve(words_.size());
  for (uint32_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second)
      throw DataError("duplicate word in vocabulary: " + words_[i]);
    total_tokens_ += counts_[i];
  }
}

std::optional<uint32_t> Vocabulary::find(std::string_view w) const {
  auto it = index_.find(std::string(w));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

uint32_t Vocabulary::id_or_unk(std::string_view w) const {
  if (auto id = find(w)) return *id;
  if (!has_unk())
    throw std::logic_error("vocabulary has no unk entry for lookup misses");
  return unk_id_;
}

void Vocabulary::save(std::ostream& out) const {
  for (size_t i = 0; i < words_.size(); ++i)
    out << words_[i] << '\t' << counts_[i] << '\n';
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary file: " + path);
  save(out);
  if (!out.good()) throw DataError("error writing vocabulary file: " + path);
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<std::string> words;
  std::vector<uint64_t> counts;
  uint32_t unk = kNoUnk;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t tab = line.rfind('\t');
    if (tab == std::string::npos)
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      ": missing tab separator");
    std::string word = line.substr(0, tab);
    uint64_t count = 0;
    try {
      count = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      ": bad count field");
    }
    if (word == kUnkToken) unk = static_cast<uint32_t>(words.size());
    words.push_back(std::move(word));
    counts.push_back(count);
  }
  if (words.empty()) throw DataError("empty vocabulary file");
  return Vocabulary(std::move(words), std::move(counts), unk);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  return load(static_cast<std::istream&>(in));
}

uint64_t Vocabulary::content_hash() const {
  std::ostringstream text;
  save(text);
  const std::string s = text.str();
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Vocabulary build_vocabulary(std::istream& conllu, const VocabularyOptions& opt,
                            VocabularyStats* stats) {
  if (opt.max_size < 2)
    throw std::invalid_argument("max_size must leave room for unk");
  std::unordered_map<std::string, uint64_t> freq;
  VocabularyStats local;
  ConlluReader reader(conllu, opt.lowercase);
  while (auto item = reader.next()) {
    if (std::holds_alternative<ConlluError>(*item)) {
      ++local.parse_errors;
      continue;
    }
    const auto& sentence = std::get<ConlluSentence>(*item);
    ++local.sentences;
    for (const std::string& form : sentence.forms) ++freq[form];
  }
  if (freq.empty()) throw DataError("empty corpus: no trainable vocabulary");

  std::vector<std::pair<std::string, uint64_t>> ranked(freq.begin(),
                                                       freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  // The unk entry occupies one slot of the size budget.
  const size_t cap = opt.max_size - 1;
  std::vector<std::string> words;
  std::vector<uint64_t> counts;
  uint64_t dropped_tokens = 0;
  for (auto& [word, count] : ranked) {
    if (count >= opt.min_count && words.size() < cap) {
      words.push_back(std::move(word));
      counts.push_back(count);
    } else {
      dropped_tokens += count;
      ++local.dropped_words;
    }
  }
  const uint32_t unk_id = static_cast<uint32_t>(words.size());
  words.emplace_back(Vocabulary::kUnkToken);
  counts.push_back(dropped_tokens);
  if (stats) *stats = local;
  return Vocabulary(std::move(words), std::move(counts), unk_id);
}

Vocabulary build_vocabulary_file(const std::string& path,
                                 const VocabularyOptions& opt,
                                 VocabularyStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return build_vocabulary(in, opt, stats);
}

double keep_probability(uint32_t word_id, const Vocabulary& vocab,
                        double threshold) {
  if (threshold <= 0) throw std::invalid_argument("threshold must be > 0");
  if (vocab.total_tokens() == 0)
    throw std::invalid_argument("vocabulary has no token counts");
  const double f = static_cast<double>(vocab.count(word_id)) /
                   static_cast<double>(vocab.total_tokens());
  if (f <= 0.0) return 1.0;
  return std::min(1.0, std::sqrt(threshold / f));
}

std::vector<size_t> select_targets(const TokenizedSentence& sentence,
                                   const Vocabulary& vocab, double threshold,
                                   Rng& rng) {
  std::vector<size_t> targets;
  for (size_t i = 0; i < sentence.size(); ++i) {
    const uint32_t id = sentence.token_ids[i];
    if (vocab.has_unk() && id == vocab.unk_id()) continue;
    if (rng.uniform() < keep_probability(id, vocab, threshold))
      targets.push_back(i);
  }
  return targets;
}

}  // namespace syngcn
