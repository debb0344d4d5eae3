#include "semcom/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

namespace semcom {
namespace {

const char* kReservedTokens[kReservedCount] = {"<pad>", "<unk>", "<bos>", "<eos>"};

bool is_valid_utf8(const std::string& s) {
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  std::size_t i = 0, n = s.size();
  while (i < n) {
    unsigned char c = p[i];
    std::size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      if (c < 0xC2) return false;  // overlong
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      if (c > 0xF4) return false;  // beyond U+10FFFF
    } else {
      return false;
    }
    if (i + extra >= n) return false;  // truncated sequence
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((p[i + k] & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

}  // namespace

Vocab::Vocab() {
  tokens_.reserve(kReservedCount);
  for (int i = 0; i < kReservedCount; ++i) {
    tokens_.emplace_back(kReservedTokens[i]);
    ids_.emplace(kReservedTokens[i], i);
  }
}

Vocab::Vocab(const std::vector<std::string>& ranked) : Vocab() {
  for (const auto& tok : ranked) {
    if (ids_.count(tok)) continue;
    ids_.emplace(tok, static_cast<int>(tokens_.size()));
    tokens_.push_back(tok);
  }
}

int Vocab::id_of(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token_of(int id) const {
  if (id < 0 || id >= static_cast<int>(tokens_.size()))
    throw InvalidArgument("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocab::contains(const std::string& token) const { return ids_.count(token) > 0; }

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return out;
}

Vocab build_vocab(const Corpus& corpus, int min_count) {
  if (corpus.sentences.empty()) throw InvalidArgument("build_vocab: empty corpus");
  if (min_count < 1) throw InvalidArgument("build_vocab: min_count must be >= 1");
  // std::map keeps ties in lexicographic order before the stable sort.
  std::map<std::string, long> freq;
  for (const auto& s : corpus.sentences)
    for (const auto& tok : split_tokens(s.text)) ++freq[tok];
  std::vector<std::pair<std::string, long>> items(freq.begin(), freq.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> ranked;
  for (const auto& [tok, count] : items)
    if (count >= min_count) ranked.push_back(tok);
  return Vocab(ranked);
}

TokenSequence tokenize(const std::string& text, const Vocab& vocab, Index max_len) {
  if (max_len < 2) throw InvalidArgument("tokenize: max_len must fit bos and eos");
  if (!is_valid_utf8(text)) throw InvalidArgument("tokenize: invalid UTF-8 input");
  TokenSequence seq;
  seq.original_text = text;
  seq.ids.push_back(kBosId);
  const Index interior_cap = max_len - 2;
  Index count = 0;
  for (const auto& tok : split_tokens(text)) {
    if (count >= interior_cap) break;
    seq.ids.push_back(vocab.id_of(tok));
    ++count;
  }
  seq.ids.push_back(kEosId);
  return seq;
}

std::string detokenize(const TokenSequence& seq, const Vocab& vocab) {
  std::string out;
  for (int id : seq.ids) {
    const std::string& tok = vocab.token_of(id);
    if (id == kPadId || id == kBosId || id == kEosId) continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

Vector bow_vector(const std::string& text, const Vocab& vocab) {
  Vector counts = Vector::Zero(vocab.size());
  for (const auto& tok : split_tokens(text)) counts[vocab.id_of(tok)] += 1.0;
  return counts;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("load_corpus: cannot open " + path);
  Corpus corpus;
  corpus.source_path = path;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!is_valid_utf8(line))
      throw RuntimeFailure("load_corpus: invalid UTF-8 at " + path + ":" +
                           std::to_string(line_no));
    LabeledSentence s;
    auto tab = line.find('\t');
    if (tab != std::string::npos) {
      s.label = line.substr(0, tab);
      s.text = line.substr(tab + 1);
    } else {
      s.text = line;
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

}  // namespace semcom
