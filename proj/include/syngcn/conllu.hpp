#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace syngcn {

class Vocabulary;

// One sentence as read from CoNLL-U: surface forms plus the dependency
// arcs. heads[i] is the 1-based index of token i's head, 0 for the root.
struct ConlluSentence {
  std::vector<std::string> forms;
  std::vector<int> heads;
  std::vector<std::string> labels;

  size_t size() const { return forms.size(); }
};

// Recoverable per-sentence parse failure; the reader resumes with the next
// blank-line-delimited block.
struct ConlluError {
  size_t line_number = 0;
  std::string message;
};

using ConlluItem = std::variant<ConlluSentence, ConlluError>;

// Streaming CoNLL-U reader. Token lines have 10 tab-separated columns; only
// FORM, HEAD and DEPREL are used. Comment lines, multiword ranges ("3-4")
// and empty nodes ("5.1") are skipped. Never throws on malformed bytes:
// every block yields either a sentence or an error.
class ConlluReader {
 public:
  explicit ConlluReader(std::istream& in, bool lowercase = true);

  std::optional<ConlluItem> next();

 private:
  std::istream& in_;
  bool lowercase_;
  size_t line_number_ = 0;
  bool eof_ = false;
};

// Sentence mapped into a vocabulary's id space. heads/labels carry over
// unchanged from the raw sentence.
struct TokenizedSentence {
  std::vector<uint32_t> token_ids;
  std::vector<int> heads;
  std::vector<std::string> labels;

  size_t size() const { return token_ids.size(); }
};

TokenizedSentence tokenize(const ConlluSentence& sentence,
                           const Vocabulary& vocab);

}  // namespace syngcn
