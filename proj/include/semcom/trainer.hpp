#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "semcom/optim.hpp"
#include "semcom/pipeline.hpp"
#include "semcom/rng.hpp"

namespace semcom {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 8;
  AdamConfig adam;          // learning rate and moment defaults
  double snr_lo_db = -5.0;  // training SNR drawn uniformly from [lo, hi]
  double snr_hi_db = 20.0;
  double lambda_ce = 1.0;
  double lambda_mi = 0.1;
  int mi_negatives = 8;     // clamped to the batch row count - 1
  double mi_tau = 0.1;
  ChannelType channel = ChannelType::Awgn;
  std::uint64_t master_seed = 1;

  // lo == hi is allowed: the separate-coding baseline trains at one SNR.
  void validate() const;
};

double sample_snr(const TrainConfig& config, Rng& rng);

struct TrainStepStats {
  long step = 0;
  double ce = 0.0;     // per-token cross entropy
  double mi_lb = 0.0;  // mutual-information lower bound
  double total = 0.0;  // lambda_ce * ce - lambda_mi * mi_lb
};

struct JointBatchStats {
  double ce = 0.0;
  double mi_lb = 0.0;
  double total = 0.0;
  long tokens = 0;
};

// One batch of the joint objective with a frozen noise stream: encode,
// cross the channel at snr_db, decode, then CE plus the MI bound between
// transmitted and received symbol rows under the critic projection.
// Gradients (when requested) accumulate into g_sem / g_chan / g_wc.
// Deterministic in (params, batch, noise_seed); the noise sample never
// depends on parameter values, so gradients flow through the signal only.
JointBatchStats joint_batch(const std::vector<TokenSequence>& batch,
                            const SemCodecParams& sem,
                            const ChanCodecParams& chan,
                            const Matrix& critic_wc, double snr_db,
                            ChannelType channel, std::uint64_t noise_seed,
                            const TrainConfig& config, SemCodecParams* g_sem,
                            ChanCodecParams* g_chan, Matrix* g_wc);

struct TrainResult {
  std::vector<TrainStepStats> history;
  Matrix critic_wc;
  double final_loss = 0.0;
};

// Joint optimization of stack.sem, stack.chan, and the MI critic. When
// stack.kb_enabled, each batch is passed through the knowledge stage under
// the step's sampled snr before tokenization (matching the wire path), so
// the codecs learn the compressed text they will carry at low snr; that
// stage sits outside the gradient path. Aborts on a non-finite loss. Pass
// critic_wc0 to resume an earlier critic (default: identity).
TrainResult train_joint(const Corpus& corpus, Stack& stack,
                        const TrainConfig& config,
                        const Matrix* critic_wc0 = nullptr);

// Two-stage separate-coding scheme, the reference point for cliff-effect
// comparisons. Stage one trains the whole stack with the channel noiseless
// (the source code is designed free of channel impairment); stage two
// freezes the semantic codec and adapts only the channel autoencoder and
// critic at design_snr_db. Each stage runs config.epochs epochs; the
// configured snr range is ignored. Because the semantic decoder never sees
// channel noise, reconstruction collapses sharply below the design point
// where jointly trained stacks degrade gradually.
TrainResult train_separate(const Corpus& corpus, Stack& stack,
                           const TrainConfig& config, double design_snr_db,
                           const Matrix* critic_wc0 = nullptr);

// step,ce,mi_lb,total
std::string loss_history_csv(const std::vector<TrainStepStats>& history);

struct GradSlot {
  double* value = nullptr;  // parameter element to perturb
  double analytic = 0.0;    // gradient under test
};

// Central differences per slot against a re-evaluating loss closure.
// Relative error uses max(|analytic|, |numeric|, 1e-4) as denominator.
double finite_diff_check(const std::function<double()>& loss,
                         const std::vector<GradSlot>& slots,
                         double step = 1e-5);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::vector<std::pair<std::string, Matrix>> tensors;  // fixed order
  FuzzyParams fuzzy;
  std::vector<std::string> vocab_tokens;  // content tokens, id order
  SemCodecConfig sem_config;
  ChanCodecConfig chan_config;
  Index max_len = kDefaultMaxLen;
  std::uint64_t content_hash = 0;  // set on save and verified on load
};

Checkpoint snapshot_stack(const Stack& stack, const Matrix* critic_wc = nullptr);

// Binary format: magic, version, content hash, json header (tensor table,
// configs, fuzzy, vocab), then row-major 64-bit little-endian tensor data.
// Fills ckpt.content_hash.
void save_checkpoint(const std::string& path, Checkpoint& ckpt);

// Verifies version and content hash; load(save(x)) is bit-exact.
Checkpoint load_checkpoint(const std::string& path);

// Rebuilds codec params, fuzzy params, vocab, and (when present in the
// snapshot and requested) the MI critic.
void apply_checkpoint(const Checkpoint& ckpt, Stack& stack,
                      Matrix* critic_wc = nullptr);

}  // namespace semcom
