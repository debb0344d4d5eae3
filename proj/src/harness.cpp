#include "semcom/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace semcom {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

InvalidArgument entry_error(const IniEntry& e, const std::string& what) {
  return InvalidArgument("config line " + std::to_string(e.line) + " (" +
                         e.section + "." + e.key + "): " + what);
}

double to_double(const IniEntry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw entry_error(e, "expected a number, got \"" + e.value + "\"");
  }
}

long to_long(const IniEntry& e) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw entry_error(e, "expected an integer, got \"" + e.value + "\"");
  }
}

int to_int(const IniEntry& e) { return static_cast<int>(to_long(e)); }

std::uint64_t to_u64(const IniEntry& e) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw entry_error(e, "expected an unsigned integer, got \"" + e.value + "\"");
  }
}

bool to_bool(const IniEntry& e) {
  const std::string v = lower(e.value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw entry_error(e, "expected a boolean, got \"" + e.value + "\"");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const IniEntry& e) {
  std::vector<double> out;
  for (const std::string& item : split(e.value, ',')) {
    if (item.empty()) throw entry_error(e, "empty element in list");
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw entry_error(e, "expected numbers, got \"" + item + "\"");
    }
  }
  if (out.empty()) throw entry_error(e, "expected a non-empty list");
  return out;
}

Eigen::Vector3d to_vec3(const IniEntry& e) {
  const std::vector<double> v = to_doubles(e);
  if (v.size() != 3) throw entry_error(e, "expected exactly 3 values");
  return {v[0], v[1], v[2]};
}

ChannelType to_channel(const IniEntry& e) {
  try {
    return channel_from_name(lower(e.value));
  } catch (const std::exception&) {
    throw entry_error(e, "expected awgn or rayleigh, got \"" + e.value + "\"");
  }
}

std::string fmt6(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.6f", v);
  return b;
}

std::string fmtg(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%g", v);
  return b;
}

std::string hex_hash(std::uint64_t h) {
  char b[24];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw RuntimeFailure("write failed for " + path);
}

// sweep.csv -> sweep.baseline.csv
std::string sibling_with_suffix(const std::string& path,
                                const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

void attach_kb(Experiment& exp) {
  const ExperimentConfig& config = exp.config;
  if (config.tracing) {
    std::filesystem::create_directories(config.output_dir);
    exp.audit = std::make_unique<KbAudit>(config.output_dir + "/kb_audit.jsonl");
  }
  if (config.kb_backend == "identity") {
    exp.kb = std::make_unique<IdentityKb>();
  } else if (config.kb_backend == "llm") {
    LlmClientConfig llm = config.llm;
    if (!config.caching) llm.cache_dir.clear();
    exp.kb = std::make_unique<LlmKb>(llm, exp.audit.get());
  } else {
    exp.kb = std::make_unique<MockKb>(
        MockKb::with_bundled_lists(exp.corpus, exp.audit.get()));
  }
  exp.stack.kb = exp.kb.get();
  exp.stack.kb_enabled = config.kb_enabled;
  exp.stack.background = config.background;
  exp.stack.public_record = config.public_record;
}

void print_trace(std::ostream& out, const char* side, const StageTrace& trace) {
  for (const StageRecord& st : trace.stages) {
    out << "  " << side << " " << st.stage << ":";
    if (st.rows > 0)
      out << " " << st.rows << "x" << st.cols;
    else if (st.symbols > 0)
      out << " " << st.symbols << " symbols";
    else
      out << " \"" << st.text << "\"";
    if (st.flagged) out << " [flagged]";
    out << "\n";
  }
}

}  // namespace

std::vector<IniEntry> parse_ini(const std::string& text) {
  std::vector<IniEntry> entries;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.size() < 3 || t.back() != ']')
        throw InvalidArgument("config line " + std::to_string(line) +
                              ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw InvalidArgument("config line " + std::to_string(line) +
                              ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(line) +
                            ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw InvalidArgument("config line " + std::to_string(line) +
                            ": empty key");
    if (section.empty())
      throw InvalidArgument("config line " + std::to_string(line) +
                            ": key before any [section]");
    entries.push_back({section, key, trim(t.substr(eq + 1)), line});
  }
  return entries;
}

std::string ExperimentConfig::resolved_checkpoint_path() const {
  if (!checkpoint_path.empty()) return checkpoint_path;
  return output_dir + "/model.ckpt";
}

void ExperimentConfig::validate() const {
  if (corpus_path.empty())
    throw InvalidArgument("config: paths.corpus is required");
  if (output_dir.empty())
    throw InvalidArgument("config: paths.output_dir must not be empty");
  SemCodecConfig sc = sem;
  sc.vocab = kReservedCount;  // real size known only after the corpus loads
  sc.validate();
  chan.validate();
  train.validate();
  fuzzy.validate();
  if (kb_backend != "mock" && kb_backend != "llm" && kb_backend != "identity")
    throw InvalidArgument("config: kb.backend must be mock, llm, or identity");
  if (kb_backend == "llm") llm.validate();
  if (sweep.snr_list.empty())
    throw InvalidArgument("config: sweep.snr_list must not be empty");
  if (sweep.seeds < 1) throw InvalidArgument("config: sweep.seeds must be >= 1");
}

ExperimentConfig experiment_config_from(const std::vector<IniEntry>& entries) {
  ExperimentConfig config;
  PublicKbRecord record;
  bool public_seen = false;
  for (const IniEntry& e : entries) {
    const std::string id = e.section + "." + e.key;
    if (id == "paths.corpus") config.corpus_path = e.value;
    else if (id == "paths.checkpoint") config.checkpoint_path = e.value;
    else if (id == "paths.output_dir") config.output_dir = e.value;
    else if (id == "codec.d") config.sem.d = to_int(e);
    else if (id == "codec.layers") config.sem.layers = to_int(e);
    else if (id == "codec.heads") config.sem.heads = to_int(e);
    else if (id == "codec.d_ff") config.sem.d_ff = to_int(e);
    else if (id == "codec.hidden") config.chan.hidden = to_int(e);
    else if (id == "codec.max_len") {
      config.sem.max_len = to_int(e);
      config.max_len = config.sem.max_len;
    } else if (id == "train.epochs") config.train.epochs = to_int(e);
    else if (id == "train.batch_size") config.train.batch_size = to_int(e);
    else if (id == "train.lr") config.train.adam.lr = to_double(e);
    else if (id == "train.snr_lo_db") config.train.snr_lo_db = to_double(e);
    else if (id == "train.snr_hi_db") config.train.snr_hi_db = to_double(e);
    else if (id == "train.lambda_ce") config.train.lambda_ce = to_double(e);
    else if (id == "train.lambda_mi") config.train.lambda_mi = to_double(e);
    else if (id == "train.mi_negatives") config.train.mi_negatives = to_int(e);
    else if (id == "train.mi_tau") config.train.mi_tau = to_double(e);
    else if (id == "train.channel") config.train.channel = to_channel(e);
    else if (id == "train.master_seed") config.train.master_seed = to_u64(e);
    else if (id == "fuzzy.a") config.fuzzy.a = to_vec3(e);
    else if (id == "fuzzy.b") config.fuzzy.b = to_vec3(e);
    else if (id == "fuzzy.c") config.fuzzy.c = to_vec3(e);
    else if (id == "fuzzy.p") config.fuzzy.p = to_vec3(e);
    else if (id == "fuzzy.q") config.fuzzy.q = to_vec3(e);
    else if (id == "kb.backend") config.kb_backend = lower(e.value);
    else if (id == "kb.enabled") config.kb_enabled = to_bool(e);
    else if (id == "llm.endpoint") config.llm.endpoint = e.value;
    else if (id == "llm.model") config.llm.model = e.value;
    else if (id == "llm.api_key_env") config.llm.api_key_env = e.value;
    else if (id == "llm.timeout_seconds") config.llm.timeout_seconds = to_int(e);
    else if (id == "llm.max_retries") config.llm.max_retries = to_int(e);
    else if (id == "llm.response_path") config.llm.response_path = e.value;
    else if (id == "llm.cache_dir") config.llm.cache_dir = e.value;
    else if (id == "llm.prompt_dir") config.llm.prompt_dir = e.value;
    else if (id == "background.user_id") config.background.user_id = e.value;
    else if (id == "background.facts") {
      config.background.facts.clear();
      for (const std::string& fact : split(e.value, ';'))
        if (!fact.empty()) config.background.facts.push_back(fact);
    } else if (id == "public_kb.user_id") {
      record.user_id = e.value;
      public_seen = true;
    } else if (id == "public_kb.face_image") {
      record.face_image_path = e.value;
      public_seen = true;
    } else if (id == "public_kb.vocal_features") {
      record.vocal_features = to_doubles(e);
      public_seen = true;
    } else if (id == "sweep.channel") config.sweep.channel = to_channel(e);
    else if (id == "sweep.snr_list") config.sweep.snr_list = to_doubles(e);
    else if (id == "sweep.seeds") config.sweep.seeds = to_int(e);
    else if (id == "toggles.tracing") config.tracing = to_bool(e);
    else if (id == "toggles.caching") config.caching = to_bool(e);
    else
      throw InvalidArgument("unknown config key: " + id + " (line " +
                            std::to_string(e.line) + ")");
  }
  config.chan.d = config.sem.d;
  config.chan.k = config.sem.d / 3;
  if (public_seen) config.public_record = record;
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  ExperimentConfig config = experiment_config_from(parse_ini(text));
  config.validate();
  return config;
}

Experiment init_experiment(const ExperimentConfig& config) {
  config.validate();
  Experiment exp;
  exp.config = config;
  exp.corpus = load_corpus(config.corpus_path);
  if (exp.corpus.sentences.empty())
    throw InvalidArgument("corpus is empty: " + config.corpus_path);
  const Vocab vocab = build_vocab(exp.corpus, 1);
  SemCodecConfig sc = config.sem;
  sc.vocab = static_cast<int>(vocab.size());
  Rng rng(derive_seed(config.train.master_seed, "init", 0));
  exp.stack.sem = SemCodecParams::init(sc, rng);
  exp.stack.chan = ChanCodecParams::init(config.chan, rng);
  exp.critic_wc = Matrix::Identity(config.chan.k, config.chan.k);
  exp.stack.vocab = vocab;
  exp.stack.max_len = config.max_len;
  exp.stack.fuzzy = config.fuzzy;
  attach_kb(exp);
  exp.stack.validate();
  return exp;
}

Experiment open_experiment(const ExperimentConfig& config,
                           const std::string& checkpoint_path) {
  config.validate();
  Experiment exp;
  exp.config = config;
  exp.corpus = load_corpus(config.corpus_path);
  if (exp.corpus.sentences.empty())
    throw InvalidArgument("corpus is empty: " + config.corpus_path);
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  apply_checkpoint(ckpt, exp.stack, &exp.critic_wc);
  attach_kb(exp);
  exp.stack.validate();
  return exp;
}

int cmd_train(const std::string& config_path, std::ostream& out,
              std::ostream& err,
              std::optional<double> separate_design_snr) {
  ExperimentConfig config;
  Experiment exp;
  try {
    config = load_experiment_config(config_path);
    exp = init_experiment(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    TrainResult result =
        separate_design_snr
            ? train_separate(exp.corpus, exp.stack, config.train,
                             *separate_design_snr, &exp.critic_wc)
            : train_joint(exp.corpus, exp.stack, config.train,
                          &exp.critic_wc);
    std::filesystem::create_directories(config.output_dir);
    Checkpoint ckpt = snapshot_stack(exp.stack, &result.critic_wc);
    const std::string ckpt_path = config.resolved_checkpoint_path();
    save_checkpoint(ckpt_path, ckpt);
    const std::string loss_path = config.output_dir + "/loss.csv";
    write_file(loss_path, loss_history_csv(result.history));

    out << "corpus " << config.corpus_path << " (" << exp.corpus.sentences.size()
        << " sentences, vocab " << exp.stack.vocab.size() << ")\n";
    out << "steps " << result.history.size() << "\n";
    if (!result.history.empty()) {
      const TrainStepStats& last = result.history.back();
      out << "final ce " << fmt6(last.ce) << "\n";
      out << "final mi_lb " << fmt6(last.mi_lb) << "\n";
      out << "final total " << fmt6(last.total) << "\n";
    }
    out << "checkpoint " << ckpt_path << "\n";
    out << "hash " << hex_hash(ckpt.content_hash) << "\n";
    out << "loss csv " << loss_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

int cmd_sweep(const std::string& config_path,
              const std::string& checkpoint_path,
              const std::string& baseline_checkpoint,
              const std::string& channel_override, bool kb_off,
              const std::string& csv_path, std::ostream& out,
              std::ostream& err) {
  ExperimentConfig config;
  std::optional<Experiment> main_exp, base_exp;
  ChannelType channel{};
  try {
    config = load_experiment_config(config_path);
    const std::string ckpt = checkpoint_path.empty()
                                 ? config.resolved_checkpoint_path()
                                 : checkpoint_path;
    main_exp = open_experiment(config, ckpt);
    if (!baseline_checkpoint.empty())
      base_exp = open_experiment(config, baseline_checkpoint);
    channel = channel_override.empty() ? config.sweep.channel
                                       : channel_from_name(lower(channel_override));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    bool labeled = false;
    for (const auto& s : main_exp->corpus.sentences)
      labeled = labeled || s.label.has_value();
    std::optional<TinyClassifier> classifier;
    if (labeled) classifier = TinyClassifier::fit(main_exp->corpus);

    const auto run_one = [&](Experiment& exp) {
      exp.stack.kb_enabled = exp.config.kb_enabled && !kb_off;
      return snr_sweep(exp.corpus, exp.stack, channel, config.sweep.snr_list,
                       config.sweep.seeds, config.train.master_seed,
                       classifier ? &*classifier : nullptr);
    };
    const SweepResult result = run_one(*main_exp);
    std::filesystem::create_directories(config.output_dir);
    const std::string out_csv =
        csv_path.empty() ? config.output_dir + "/sweep.csv" : csv_path;
    write_file(out_csv, sweep_csv(result));

    out << "channel " << channel_name(channel) << " kb "
        << (main_exp->stack.kb_enabled ? "on" : "off") << "\n";
    for (const MetricRecord& s : result.summaries)
      out << "snr " << fmtg(s.snr_db) << " token_acc " << fmt6(s.token_accuracy)
          << " bleu2 " << fmt6(s.bleu2) << " cosine " << fmt6(s.cosine)
          << " downstream " << fmt6(s.downstream_accuracy) << " failed "
          << s.failed_trials << "\n";
    out << "cliff " << fmt6(result.cliff) << "\n";
    out << "csv " << out_csv << "\n";

    if (base_exp) {
      const SweepResult base = run_one(*base_exp);
      const std::string base_csv = sibling_with_suffix(out_csv, ".baseline");
      write_file(base_csv, sweep_csv(base));
      out << "baseline cliff " << fmt6(base.cliff) << "\n";
      out << "baseline csv " << base_csv << "\n";
      out << "cliff comparison "
          << (result.cliff <= base.cliff ? "ok" : "worse") << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

int cmd_transmit(const std::string& config_path,
                 const std::string& checkpoint_path, const std::string& text,
                 double snr_db, const std::string& channel_override,
                 std::uint64_t seed, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  Experiment exp;
  ChannelType channel{};
  try {
    if (text.empty()) throw InvalidArgument("transmit text must not be empty");
    config = load_experiment_config(config_path);
    const std::string ckpt = checkpoint_path.empty()
                                 ? config.resolved_checkpoint_path()
                                 : checkpoint_path;
    exp = open_experiment(config, ckpt);
    channel = channel_override.empty() ? config.sweep.channel
                                       : channel_from_name(lower(channel_override));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    const TransmitResult tx = transmit(text, exp.stack, snr_db);
    const std::uint64_t channel_seed = derive_seed(seed, "transmit", 0);
    ChannelRealization realization{};
    const bool fading = channel == ChannelType::Rayleigh;
    const CVector received =
        fading ? rayleigh_fade(tx.symbols.symbols, snr_db, channel_seed,
                               realization)
               : awgn(tx.symbols.symbols, snr_db, channel_seed);
    const ReceiveResult rx =
        receive(received, exp.stack, snr_db, fading ? &realization : nullptr);

    out << "sent: " << text << "\n";
    const PromptDirective& d = tx.trace.directive;
    out << "directive: " << snr_class_name(d.snr_class) << " [" << fmtg(d.lo)
        << ", " << fmtg(d.hi) << "] at " << fmtg(snr_db) << " dB over "
        << channel_name(channel) << "\n";
    out << "wire: " << tx.wire_text << "\n";
    if (rx.failed) {
      out << "receive failed: " << rx.trace.failure << "\n";
    } else {
      out << "received: " << rx.text << "\n";
      out << "token accuracy "
          << fmt6(token_accuracy(tx.tokens.ids, rx.tokens.ids)) << "\n";
    }
    out << "trace:\n";
    print_trace(out, "tx", tx.trace);
    print_trace(out, "rx", rx.trace);
    if (!rx.manifest_json.empty()) {
      std::filesystem::create_directories(config.output_dir);
      const std::string manifest_path = config.output_dir + "/manifest.json";
      write_file(manifest_path, rx.manifest_json + "\n");
      out << "manifest " << manifest_path << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

int cmd_tune_fuzzy(const std::string& config_path,
                   const std::string& checkpoint_path,
                   const std::string& out_checkpoint, std::ostream& out,
                   std::ostream& err) {
  ExperimentConfig config;
  Experiment exp;
  std::string ckpt_path;
  try {
    config = load_experiment_config(config_path);
    if (config.kb_backend == "llm") {
      const bool cached = config.caching && !config.llm.cache_dir.empty();
      const char* key = std::getenv(config.llm.api_key_env.c_str());
      if (!cached && (!key || !*key))
        throw InvalidArgument("llm backend needs a response cache or " +
                              config.llm.api_key_env + " set");
    }
    ckpt_path = checkpoint_path.empty() ? config.resolved_checkpoint_path()
                                        : checkpoint_path;
    exp = open_experiment(config, ckpt_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    const std::vector<double>& samples = config.sweep.snr_list;
    const FuzzyParams before_params = exp.stack.fuzzy;
    const double before = tune_objective(before_params, exp.corpus, *exp.kb,
                                         exp.stack.vocab, samples);
    const FuzzyParams tuned = tune(before_params, exp.corpus, *exp.kb,
                                   exp.stack.vocab, samples);
    const double after =
        tune_objective(tuned, exp.corpus, *exp.kb, exp.stack.vocab, samples);
    out << "objective before " << fmt6(before) << "\n";
    out << "objective after " << fmt6(after) << "\n";
    out << "q " << fmtg(before_params.q[0]) << " " << fmtg(before_params.q[1])
        << " " << fmtg(before_params.q[2]) << " -> " << fmtg(tuned.q[0]) << " "
        << fmtg(tuned.q[1]) << " " << fmtg(tuned.q[2]) << "\n";

    exp.stack.fuzzy = tuned;
    Checkpoint ckpt = snapshot_stack(exp.stack, &exp.critic_wc);
    const std::string target =
        out_checkpoint.empty() ? ckpt_path : out_checkpoint;
    save_checkpoint(target, ckpt);
    out << "checkpoint " << target << "\n";
    out << "hash " << hex_hash(ckpt.content_hash) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

int cmd_ratio(const std::string& media_path,
              const std::string& transcript_path, std::ostream& out,
              std::ostream& err) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const auto media_size = fs::file_size(media_path, ec);
  if (ec) {
    err << "error: cannot read " << media_path << "\n";
    return 2;
  }
  const auto transcript_size = fs::file_size(transcript_path, ec);
  if (ec) {
    err << "error: cannot read " << transcript_path << "\n";
    return 2;
  }
  double ratio = 0.0;
  try {
    ratio = compression_ratio(static_cast<long long>(media_size),
                              static_cast<long long>(transcript_size));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  out << "media " << media_size << " bytes " << media_path << "\n";
  out << "transcript " << transcript_size << " bytes " << transcript_path
      << "\n";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.8f", ratio);
  out << "ratio " << buf << "\n";
  return 0;
}

}  // namespace semcom
