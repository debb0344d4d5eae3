#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "semcom/types.hpp"

namespace semcom {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kBosId = 2;
inline constexpr int kEosId = 3;
inline constexpr int kReservedCount = 4;
inline constexpr Index kDefaultMaxLen = 32;

// Word-level vocabulary with fixed reserved ids. Content tokens are
// assigned dense ids from kReservedCount upward, ordered by descending
// corpus frequency with lexicographic tie-break, so id assignment is
// reproducible across runs.
class Vocab {
 public:
  Vocab();
  // `ranked` must already be in final id order (frequency then lex).
  explicit Vocab(const std::vector<std::string>& ranked);

  int id_of(const std::string& token) const;  // kUnkId when absent
  const std::string& token_of(int id) const;  // throws on out-of-range id
  bool contains(const std::string& token) const;
  Index size() const { return static_cast<Index>(tokens_.size()); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

struct TokenSequence {
  std::vector<int> ids;
  std::string original_text;
};

struct LabeledSentence {
  std::string text;
  std::optional<std::string> label;
};

struct Corpus {
  std::vector<LabeledSentence> sentences;
  std::string source_path;
};

// Lowercases, splits on whitespace, and breaks ASCII punctuation out as
// single-character tokens. "A b." -> {"a", "b", "."}.
std::vector<std::string> split_tokens(const std::string& text);

Vocab build_vocab(const Corpus& corpus, int min_count);

// bos/eos framing; out-of-vocab words map to unk; interior tokens beyond
// max_len - 2 are truncated so the eos always survives.
TokenSequence tokenize(const std::string& text, const Vocab& vocab,
                       Index max_len = kDefaultMaxLen);

// Space-joined tokens. pad/bos/eos are dropped; unk renders as "<unk>".
std::string detokenize(const TokenSequence& seq, const Vocab& vocab);

// Term counts per vocab id (unknown words counted under unk).
Vector bow_vector(const std::string& text, const Vocab& vocab);

// One record per line, optionally "label<TAB>text". Blank lines skipped.
Corpus load_corpus(const std::string& path);

}  // namespace semcom
