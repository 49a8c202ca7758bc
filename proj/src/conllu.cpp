#include "syngcn/conllu.hpp"

#include <cctype>
#include <charconv>
#include <istream>

#include "syngcn/vocab.hpp"

namespace syngcn {

namespace {

void lowercase_ascii(std::string& s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Tab-split preserving empty fields.
std::vector<std::string_view> split_tabs(const std::string& line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.emplace_back(line.data() + start, line.size() - start);
      return out;
    }
    out.emplace_back(line.data() + start, tab - start);
    start = tab + 1;
  }
}

}  // namespace

ConlluReader::ConlluReader(std::istream& in, bool lowercase)
    : in_(in), lowercase_(lowercase) {}

std::optional<ConlluItem> ConlluReader::next() {
  ConlluSentence sentence;
  std::vector<size_t> token_lines;
  bool failed = false;
  ConlluError error;
  std::string line;

  auto finalize = [&]() -> std::optional<ConlluItem> {
    if (failed) return ConlluItem(std::move(error));
    // Head indices can only be validated once the block is complete.
    const int n = static_cast<int>(sentence.size());
    for (int i = 0; i < n; ++i) {
      const int h = sentence.heads[i];
      if (h < 0 || h > n)
        return ConlluItem(ConlluError{
            token_lines[i], "head index " + std::to_string(h) +
                                " out of range for sentence of length " +
                                std::to_string(n)});
      if (h == i + 1)
        return ConlluItem(
            ConlluError{token_lines[i], "token is its own head"});
    }
    return ConlluItem(std::move(sentence));
  };

  while (true) {
    if (eof_ || !std::getline(in_, line)) {
      eof_ = true;
      if (failed || !sentence.forms.empty()) return finalize();
      return std::nullopt;
    }
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (failed || !sentence.forms.empty()) return finalize();
      continue;  // stray blank line
    }
    if (line[0] == '#') continue;
    if (failed) continue;  // skip the rest of a bad block

    auto cols = split_tabs(line);
    if (cols.size() != 10) {
      failed = true;
      error = {line_number_, "expected 10 tab-separated columns, got " +
                                 std::to_string(cols.size())};
      continue;
    }
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos) continue;  // multiword range
    if (id.find('.') != std::string_view::npos) continue;  // empty node
    int head = 0;
    if (!parse_int(cols[6], head)) {
      failed = true;
      error = {line_number_,
               "non-integer HEAD field \"" + std::string(cols[6]) + "\""};
      continue;
    }
    std::string form(cols[1]);
    if (lowercase_) lowercase_ascii(form);
    sentence.forms.push_back(std::move(form));
    sentence.heads.push_back(head);
    sentence.labels.emplace_back(cols[7]);
    token_lines.push_back(line_number_);
  }
}

TokenizedSentence tokenize(const ConlluSentence& sentence,
                           const Vocabulary& vocab) {
  TokenizedSentence out;
  out.token_ids.reserve(sentence.size());
  for (const std::string& form : sentence.forms)
    out.token_ids.push_back(vocab.id_or_unk(form));
  out.heads = sentence.heads;
  out.labels = sentence.labels;
  return out;
}

}  // namespace syngcn
