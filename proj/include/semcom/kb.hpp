#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semcom/fuzzy.hpp"
#include "semcom/text.hpp"

namespace semcom {

struct Background {
  std::string user_id;
  std::vector<std::string> facts;
};

// Every backend operation is total: on internal failure the input text comes
// back with pass_through set instead of an exception.
struct KbResult {
  std::string text;
  bool pass_through = false;
  bool flagged = false;
  std::string note;

  KbResult() = default;
  KbResult(std::string t, bool pt = false, bool fl = false, std::string n = "")
      : text(std::move(t)), pass_through(pt), flagged(fl), note(std::move(n)) {}
};

struct KbExchange {
  std::string backend;
  std::string operation;
  std::string prompt;
  std::string response;
  double latency_ms = 0.0;
  bool pass_through = false;
};

// Newline-delimited JSON audit of knowledge-base calls.
class KbAudit {
 public:
  explicit KbAudit(std::string path) : path_(std::move(path)) {}
  void record(const KbExchange& exchange);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mutex_;
};

class KbBackend {
 public:
  virtual ~KbBackend() = default;
  virtual std::string id() const = 0;
  virtual KbResult disambiguate(const std::string& text,
                                const Background& background) = 0;
  virtual KbResult correct(const std::string& text,
                           const Background& background) = 0;
  virtual KbResult encode(const std::string& text,
                          const PromptDirective& directive) = 0;
  virtual KbResult decode(const std::string& text,
                          const std::string& context) = 0;
};

// No-op backend: every operation returns its input.
class IdentityKb : public KbBackend {
 public:
  std::string id() const override { return "identity"; }
  KbResult disambiguate(const std::string& text, const Background&) override {
    return {text};
  }
  KbResult correct(const std::string& text, const Background&) override {
    return {text};
  }
  KbResult encode(const std::string& text, const PromptDirective&) override {
    return {text};
  }
  KbResult decode(const std::string& text, const std::string&) override {
    return {text};
  }
};

struct WordLists {
  std::set<std::string> stopwords;
  std::set<std::string> modifiers;
  std::set<std::string> content_words;
};

std::vector<std::string> load_word_list(const std::string& path);
// Loads stopwords.txt, modifiers.txt, content_words.txt from a directory.
WordLists load_word_lists(const std::string& dir);

// Lowercased word with surrounding ASCII punctuation stripped; "" for pure
// punctuation tokens.
std::string word_key(const std::string& word);

struct Substitution {
  std::string match;        // substring of the incoming text
  std::string fact_hint;    // must appear in some background fact; "" = any
  std::string replacement;
};

// Deterministic in-process backend. Disambiguation and correction use fixed
// substitution tables plus a corpus bigram model for <unk> repair; encoding
// drops words by priority (stopwords, modifiers, then rare non-content
// words) until the directive's ratio is met, never touching content words.
class MockKb : public KbBackend {
 public:
  MockKb(const Corpus& corpus, WordLists lists, KbAudit* audit = nullptr);
  static MockKb with_bundled_lists(const Corpus& corpus,
                                   KbAudit* audit = nullptr);

  std::string id() const override { return "mock"; }
  KbResult disambiguate(const std::string& text,
                        const Background& background) override;
  KbResult correct(const std::string& text,
                   const Background& background) override;
  KbResult encode(const std::string& text,
                  const PromptDirective& directive) override;
  KbResult decode(const std::string& text, const std::string& context) override;

 private:
  void log(const std::string& operation, const std::string& input,
           const KbResult& result);

  WordLists lists_;
  std::map<std::string, long> word_freq_;
  std::map<std::pair<std::string, std::string>, long> bigram_;
  std::vector<Substitution> disambiguations_;
  std::vector<Substitution> corrections_;
  // exact-text exemplars: input -> per-class rewrite
  std::map<std::string, std::map<SnrClass, std::string>> encode_exemplars_;
  KbAudit* audit_ = nullptr;
};

// Fills {slot} placeholders in data/prompts/<template_id>.txt. Unknown
// template or an unfilled placeholder is an error.
std::string render_prompt(const std::string& template_id,
                          const std::map<std::string, std::string>& slots,
                          const std::string& prompt_dir);

struct LlmClientConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8089/v1/chat/completions
  std::string model = "gpt-4";
  std::string api_key_env = "SEMCOM_LLM_API_KEY";
  double timeout_seconds = 30.0;
  int max_retries = 2;
  std::string response_path = "choices.0.message.content";
  std::string cache_dir;    // empty disables the on-disk response cache
  std::string prompt_dir;   // empty uses the bundled templates
  void validate() const;
};

// HTTP chat-completion client; request body is {model, messages:[{role:
// "user", content}]} with the api key sent as a bearer header. Failures
// after retries fall back to pass-through.
class LlmKb : public KbBackend {
 public:
  explicit LlmKb(LlmClientConfig config, KbAudit* audit = nullptr);

  std::string id() const override { return "llm:" + config_.model; }
  KbResult disambiguate(const std::string& text,
                        const Background& background) override;
  KbResult correct(const std::string& text,
                   const Background& background) override;
  KbResult encode(const std::string& text,
                  const PromptDirective& directive) override;
  KbResult decode(const std::string& text, const std::string& context) override;

 private:
  KbResult call(const std::string& operation, const std::string& template_id,
                const std::map<std::string, std::string>& slots,
                const std::string& fallback_text);

  LlmClientConfig config_;
  KbAudit* audit_ = nullptr;
};

}  // namespace semcom
