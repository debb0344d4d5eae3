#include "semcom/kb.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <semaphore>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "semcom/rng.hpp"

namespace semcom {

namespace {

std::string bundled_data_dir() { return SEMCOM_DATA_DIR; }

std::vector<std::string> whitespace_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string join_words(const std::vector<std::string>& words,
                       const std::vector<bool>& keep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!keep[i]) continue;
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool facts_match(const Background& background, const std::string& hint) {
  if (hint.empty()) return true;
  for (const auto& fact : background.facts)
    if (fact.find(hint) != std::string::npos) return true;
  return false;
}

// Replaces the first occurrence of each matching row.
std::string apply_substitutions(const std::string& text,
                                const std::vector<Substitution>& rows,
                                const Background& background) {
  std::string out = text;
  for (const auto& row : rows) {
    if (!facts_match(background, row.fact_hint)) continue;
    auto pos = out.find(row.match);
    if (pos == std::string::npos) continue;
    out = out.substr(0, pos) + row.replacement + out.substr(pos + row.match.size());
  }
  return out;
}

}  // namespace

std::string word_key(const std::string& word) {
  std::size_t b = 0, e = word.size();
  auto is_punct = [](unsigned char c) { return std::ispunct(c) != 0; };
  while (b < e && is_punct(word[b])) ++b;
  while (e > b && is_punct(word[e - 1])) --e;
  std::string key = word.substr(b, e - b);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return key;
}

std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure("load_word_list: cannot open " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) words.push_back(line);
  }
  return words;
}

WordLists load_word_lists(const std::string& dir) {
  WordLists lists;
  for (const auto& w : load_word_list(dir + "/stopwords.txt"))
    lists.stopwords.insert(w);
  for (const auto& w : load_word_list(dir + "/modifiers.txt"))
    lists.modifiers.insert(w);
  for (const auto& w : load_word_list(dir + "/content_words.txt"))
    lists.content_words.insert(w);
  return lists;
}

void KbAudit::record(const KbExchange& exchange) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw RuntimeFailure("KbAudit: cannot open " + path_);
  nlohmann::json j{{"backend", exchange.backend},
                   {"operation", exchange.operation},
                   {"prompt", exchange.prompt},
                   {"response", exchange.response},
                   {"latency_ms", exchange.latency_ms},
                   {"pass_through", exchange.pass_through}};
  out << j.dump() << '\n';
}

MockKb::MockKb(const Corpus& corpus, WordLists lists, KbAudit* audit)
    : lists_(std::move(lists)), audit_(audit) {
  for (const auto& sentence : corpus.sentences) {
    auto tokens = split_tokens(sentence.text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      ++word_freq_[tokens[i]];
      if (i + 1 < tokens.size()) ++bigram_[{tokens[i], tokens[i + 1]}];
    }
  }
  disambiguations_ = {
      {"I can't bear children; they seldom listen to me.", "given birth",
       "Alice can't tolerate the presence of children; they seldom listen to "
       "her."},
  };
  corrections_ = {
      {"Alice can't tolerate the presence of children; they always listen to "
       "her",
       "Alice",
       "I can't tolerate the presence of children; they barely listen to me."},
  };
  encode_exemplars_ = {
      {"A young child, with a beaming smile, eagerly slides down the slide.",
       {{SnrClass::Low, "A young child, smiling, slides down the slide."},
        {SnrClass::Mid,
         "A young child, with a smile, eagerly slides down the slide."}}},
  };
}

MockKb MockKb::with_bundled_lists(const Corpus& corpus, KbAudit* audit) {
  return MockKb(corpus, load_word_lists(bundled_data_dir()), audit);
}

void MockKb::log(const std::string& operation, const std::string& input,
                 const KbResult& result) {
  if (!audit_) return;
  audit_->record(
      {id(), operation, input, result.text, 0.0, result.pass_through});
}

KbResult MockKb::disambiguate(const std::string& text,
                              const Background& background) {
  KbResult result{apply_substitutions(text, disambiguations_, background)};
  log("disambiguate", text, result);
  return result;
}

KbResult MockKb::correct(const std::string& text, const Background& background) {
  std::string out = apply_substitutions(text, corrections_, background);
  auto words = whitespace_words(out);
  bool changed = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (word_key(words[i]) != "unk") continue;
    std::string next, prev;
    if (i + 1 < words.size()) next = word_key(words[i + 1]);
    if (i > 0) prev = word_key(words[i - 1]);
    std::string best;
    long best_count = 0;
    for (const auto& [w, freq] : word_freq_) {
      if (!next.empty()) {
        auto it = bigram_.find({w, next});
        if (it != bigram_.end() && it->second > best_count) {
          best = w;
          best_count = it->second;
        }
      }
    }
    if (best.empty() && !prev.empty()) {
      for (const auto& [w, freq] : word_freq_) {
        auto it = bigram_.find({prev, w});
        if (it != bigram_.end() && it->second > best_count) {
          best = w;
          best_count = it->second;
        }
      }
    }
    if (best.empty()) {
      for (const auto& [w, freq] : word_freq_)
        if (freq > best_count) {
          best = w;
          best_count = freq;
        }
    }
    if (!best.empty()) {
      words[i] = best;
      changed = true;
    }
  }
  if (changed) out = join_words(words, std::vector<bool>(words.size(), true));
  KbResult result{out};
  log("correct", text, result);
  return result;
}

KbResult MockKb::encode(const std::string& text,
                        const PromptDirective& directive) {
  if (directive.snr_class == SnrClass::High) {
    KbResult result{text};
    log("encode", text, result);
    return result;
  }
  auto exemplar = encode_exemplars_.find(trim(text));
  if (exemplar != encode_exemplars_.end()) {
    auto row = exemplar->second.find(directive.snr_class);
    if (row != exemplar->second.end()) {
      KbResult result{row->second};
      log("encode", text, result);
      return result;
    }
  }
  auto words = whitespace_words(text);
  const double total = static_cast<double>(words.size());
  if (words.empty()) {
    KbResult result{text};
    log("encode", text, result);
    return result;
  }
  std::vector<bool> keep(words.size(), true);
  long kept = static_cast<long>(words.size());
  auto ratio = [&] { return static_cast<double>(kept) / total; };
  auto drop_in_order = [&](auto&& candidate) {
    for (std::size_t i = 0; i < words.size() && ratio() > directive.hi; ++i) {
      if (!keep[i] || kept <= 1) continue;
      if (candidate(word_key(words[i]))) {
        keep[i] = false;
        --kept;
      }
    }
  };
  drop_in_order([&](const std::string& k) { return lists_.stopwords.count(k) > 0; });
  drop_in_order([&](const std::string& k) { return lists_.modifiers.count(k) > 0; });
  if (ratio() > directive.hi) {
    // remaining non-content words, rarest first, position as tie-break
    std::vector<std::pair<long, std::size_t>> order;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!keep[i]) continue;
      const std::string k = word_key(words[i]);
      if (lists_.content_words.count(k) > 0) continue;
      auto it = word_freq_.find(k);
      order.push_back({it == word_freq_.end() ? 0 : it->second, i});
    }
    std::sort(order.begin(), order.end());
    for (const auto& [freq, i] : order) {
      if (ratio() <= directive.hi || kept <= 1) break;
      keep[i] = false;
      --kept;
    }
  }
  KbResult result{join_words(words, keep)};
  if (ratio() > directive.hi + 1e-12 || ratio() < directive.lo - 0.05 - 1e-12) {
    result.flagged = true;
    result.note = "ratio unreachable without dropping content words";
  }
  log("encode", text, result);
  return result;
}

KbResult MockKb::decode(const std::string& text, const std::string&) {
  std::string out = trim(text);
  if (out.empty()) {
    KbResult result{text};
    log("decode", text, result);
    return result;
  }
  for (auto& c : out) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  const char last = out.back();
  if (last != '.' && last != '!' && last != '?') out += '.';
  KbResult result{out};
  log("decode", text, result);
  return result;
}

std::string render_prompt(const std::string& template_id,
                          const std::map<std::string, std::string>& slots,
                          const std::string& prompt_dir) {
  if (template_id.empty() ||
      template_id.find_first_not_of(
          "abcdefghijklmnopqrstuvwxyz0123456789_") != std::string::npos)
    throw InvalidArgument("render_prompt: bad template id " + template_id);
  const std::string dir =
      prompt_dir.empty() ? bundled_data_dir() + "/prompts" : prompt_dir;
  std::ifstream in(dir + "/" + template_id + ".txt");
  if (!in)
    throw InvalidArgument("render_prompt: unknown template " + template_id);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string out = buf.str();
  for (const auto& [key, value] : slots) {
    const std::string placeholder = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = out.find(placeholder, pos)) != std::string::npos) {
      out.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  }
  auto open = out.find('{');
  while (open != std::string::npos) {
    auto close = out.find('}', open);
    if (close == std::string::npos) break;
    throw InvalidArgument("render_prompt: missing slot " +
                          out.substr(open, close - open + 1));
  }
  return out;
}

void LlmClientConfig::validate() const {
  if (endpoint.rfind("http", 0) != 0)
    throw InvalidArgument("llm config: endpoint must be an http(s) url");
  if (model.empty()) throw InvalidArgument("llm config: empty model");
  if (timeout_seconds <= 0.0)
    throw InvalidArgument("llm config: timeout must be positive");
  if (max_retries < 0) throw InvalidArgument("llm config: negative retries");
  if (response_path.empty())
    throw InvalidArgument("llm config: empty response path");
}

LlmKb::LlmKb(LlmClientConfig config, KbAudit* audit)
    : config_(std::move(config)), audit_(audit) {
  config_.validate();
}

namespace {

std::string join_facts(const Background& background) {
  std::string out;
  for (const auto& fact : background.facts) {
    if (!out.empty()) out += '\n';
    out += "- " + fact;
  }
  if (out.empty()) out = "- (none)";
  return out;
}

std::string percent(double ratio) {
  return std::to_string(static_cast<int>(std::lround(ratio * 100.0))) + "%";
}

// Walks a dot path like choices.0.message.content through a JSON value.
const nlohmann::json* walk_path(const nlohmann::json& root,
                                const std::string& path) {
  const nlohmann::json* node = &root;
  std::istringstream in(path);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (node->is_array()) {
      if (part.empty() ||
          part.find_first_not_of("0123456789") != std::string::npos)
        return nullptr;
      std::size_t idx = std::stoul(part);
      if (idx >= node->size()) return nullptr;
      node = &(*node)[idx];
    } else if (node->is_object()) {
      auto it = node->find(part);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else {
      return nullptr;
    }
  }
  return node;
}

}  // namespace

KbResult LlmKb::call(const std::string& operation,
                     const std::string& template_id,
                     const std::map<std::string, std::string>& slots,
                     const std::string& fallback_text) {
  std::string prompt;
  try {
    prompt = render_prompt(template_id, slots, config_.prompt_dir);
  } catch (const std::exception& e) {
    KbResult result{fallback_text, true, false, e.what()};
    if (audit_) audit_->record({id(), operation, "", "", 0.0, true});
    return result;
  }

  const std::string cache_key =
      [&] {
        const std::string material = id() + "\x1f" + template_id + "\x1f" + prompt;
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(
                          fnv1a64(material.data(), material.size())));
        return std::string(buf);
      }();
  const std::string cache_path =
      config_.cache_dir.empty() ? "" : config_.cache_dir + "/" + cache_key + ".json";
  if (!cache_path.empty()) {
    std::ifstream in(cache_path);
    if (in) {
      try {
        nlohmann::json j = nlohmann::json::parse(in);
        KbResult result{j.at("response").get<std::string>()};
        if (audit_)
          audit_->record({id(), operation, prompt, result.text, 0.0, false});
        return result;
      } catch (const std::exception&) {
        // unreadable cache entry: fall through to a live call
      }
    }
  }

  const char* key_raw = std::getenv(config_.api_key_env.c_str());
  const std::string api_key = key_raw ? key_raw : "";

  auto scheme_end = config_.endpoint.find("://");
  auto path_start = config_.endpoint.find('/', scheme_end == std::string::npos
                                                   ? 0
                                                   : scheme_end + 3);
  const std::string base = path_start == std::string::npos
                               ? config_.endpoint
                               : config_.endpoint.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);

  nlohmann::json body{
      {"model", config_.model},
      {"messages", {{{"role", "user"}, {"content", prompt}}}}};
  const std::string body_text = body.dump();

  // at most 4 requests in flight across all clients
  static std::counting_semaphore<4> in_flight(4);
  in_flight.acquire();
  const auto start = std::chrono::steady_clock::now();
  std::string response_text, error;
  bool ok = false;
  for (int attempt = 0; attempt <= config_.max_retries && !ok; ++attempt) {
    httplib::Client client(base);
    const auto seconds = static_cast<time_t>(config_.timeout_seconds);
    const auto usec = static_cast<time_t>(
        (config_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, usec);
    client.set_read_timeout(seconds, usec);
    client.set_write_timeout(seconds, usec);
    httplib::Headers headers;
    if (!api_key.empty())
      headers.insert({"Authorization", "Bearer " + api_key});
    auto res = client.Post(path, headers, body_text, "application/json");
    if (!res) {
      error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      error = "http status " + std::to_string(res->status);
      continue;
    }
    try {
      nlohmann::json parsed = nlohmann::json::parse(res->body);
      const nlohmann::json* node = walk_path(parsed, config_.response_path);
      if (!node) {
        error = "response path not found: " + config_.response_path;
        continue;
      }
      response_text =
          trim(node->is_string() ? node->get<std::string>() : node->dump());
      ok = true;
    } catch (const std::exception& e) {
      error = std::string("bad response json: ") + e.what();
    }
  }
  const double latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();
  in_flight.release();

  if (!ok) {
    KbResult result{fallback_text, true, false, error};
    if (audit_) audit_->record({id(), operation, prompt, "", latency_ms, true});
    return result;
  }
  if (!cache_path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config_.cache_dir, ec);
    // write-then-rename keeps concurrent readers away from partial entries
    const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    const std::string tmp = cache_path + "." + std::to_string(tid) + ".tmp";
    {
      std::ofstream out(tmp);
      if (out) out << nlohmann::json{{"response", response_text}}.dump() << '\n';
    }
    std::filesystem::rename(tmp, cache_path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
  }
  if (audit_)
    audit_->record({id(), operation, prompt, response_text, latency_ms, false});
  return {response_text};
}

KbResult LlmKb::disambiguate(const std::string& text,
                             const Background& background) {
  return call("disambiguate", "disambiguate",
              {{"facts", join_facts(background)}, {"text", text}}, text);
}

KbResult LlmKb::correct(const std::string& text, const Background& background) {
  return call("correct", "correct",
              {{"facts", join_facts(background)}, {"text", text}}, text);
}

KbResult LlmKb::encode(const std::string& text,
                       const PromptDirective& directive) {
  if (directive.snr_class == SnrClass::High) return {text};
  return call("encode", "kb_encode",
              {{"lo_pct", percent(directive.lo)},
               {"hi_pct", percent(directive.hi)},
               {"text", text}},
              text);
}

KbResult LlmKb::decode(const std::string& text, const std::string& context) {
  return call("decode", "kb_decode",
              {{"context", context.empty() ? "(none)" : context},
               {"text", text}},
              text);
}

}  // namespace semcom
