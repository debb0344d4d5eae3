#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semcom/kb.hpp"
#include "semcom/metrics.hpp"
#include "semcom/pipeline.hpp"
#include "semcom/trainer.hpp"

namespace semcom {

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

// Minimal INI subset: [section] headers, key = value pairs, blank lines,
// full-line comments starting with # or ;. Values keep interior spaces.
std::vector<IniEntry> parse_ini(const std::string& text);

struct SweepSettings {
  ChannelType channel = ChannelType::Awgn;
  std::vector<double> snr_list{-5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  int seeds = 5;
};

// Everything an experiment run needs, loadable from one config file.
// Unknown keys are rejected so a typo cannot silently fall back to a
// default.
struct ExperimentConfig {
  // [paths]
  std::string corpus_path;
  std::string checkpoint_path;  // empty: <output_dir>/model.ckpt
  std::string output_dir = ".";

  // [codec]; vocab size is filled from the corpus, chan.d mirrors sem.d
  SemCodecConfig sem;
  ChanCodecConfig chan;
  Index max_len = kDefaultMaxLen;

  // [train]
  TrainConfig train;

  // [fuzzy]
  FuzzyParams fuzzy;

  // [kb] / [llm] / [background] / [public_kb]
  std::string kb_backend = "mock";  // mock | llm | identity
  bool kb_enabled = true;
  LlmClientConfig llm;
  Background background;
  std::optional<PublicKbRecord> public_record;

  // [sweep]
  SweepSettings sweep;

  // [toggles]
  bool tracing = false;  // KB audit log under output_dir
  bool caching = true;   // LLM response cache on disk

  std::string resolved_checkpoint_path() const;
  void validate() const;
};

// Applies entries onto the defaults above; an unknown section.key throws
// InvalidArgument naming it. Relative paths resolve against the working
// directory, not the config file.
ExperimentConfig experiment_config_from(const std::vector<IniEntry>& entries);
ExperimentConfig load_experiment_config(const std::string& path);

// Materialized runtime objects for one config.
struct Experiment {
  ExperimentConfig config;
  Corpus corpus;
  std::unique_ptr<KbAudit> audit;
  std::unique_ptr<KbBackend> kb;
  Matrix critic_wc;
  Stack stack;
};

// Fresh codec parameters seeded from the config (training entry point).
Experiment init_experiment(const ExperimentConfig& config);

// Codec parameters, vocabulary, and fuzzy params from a checkpoint.
Experiment open_experiment(const ExperimentConfig& config,
                           const std::string& checkpoint_path);

// Subcommand bodies behind the CLI, also callable in-process. Exit
// contract: 0 success, 2 configuration/input error, 3 runtime failure.
// separate_design_snr switches training to the two-stage separate-coding
// scheme at that design point (the reference for cliff comparisons).
int cmd_train(const std::string& config_path, std::ostream& out,
              std::ostream& err,
              std::optional<double> separate_design_snr = std::nullopt);
int cmd_sweep(const std::string& config_path,
              const std::string& checkpoint_path,
              const std::string& baseline_checkpoint,
              const std::string& channel_override, bool kb_off,
              const std::string& csv_path, std::ostream& out,
              std::ostream& err);
int cmd_transmit(const std::string& config_path,
                 const std::string& checkpoint_path, const std::string& text,
                 double snr_db, const std::string& channel_override,
                 std::uint64_t seed, std::ostream& out, std::ostream& err);
int cmd_tune_fuzzy(const std::string& config_path,
                   const std::string& checkpoint_path,
                   const std::string& out_checkpoint, std::ostream& out,
                   std::ostream& err);
int cmd_ratio(const std::string& media_path,
              const std::string& transcript_path, std::ostream& out,
              std::ostream& err);

}  // namespace semcom
