#pragma once

#include <map>
#include <string>
#include <vector>

#include "semcom/channel.hpp"
#include "semcom/text.hpp"
#include "semcom/types.hpp"

namespace semcom {

struct Stack;

// One sweep trial (seed >= 0) or per-SNR summary (seed == -1).
struct MetricRecord {
  double snr_db = 0.0;
  int seed = 0;
  ChannelType channel = ChannelType::Awgn;
  double token_accuracy = 0.0;
  double bleu2 = 0.0;
  double cosine = 0.0;
  double downstream_accuracy = 0.0;
  double compression_ratio = 0.0;
  long failed_trials = 0;
};

// Fraction of the original removed: (original - compressed) / original.
double compression_ratio(long long original_bytes, long long compressed_bytes);

// Exact-position matches over max length. Identical sequences score 1,
// an empty hypothesis against a non-empty reference scores 0.
double token_accuracy(const std::vector<int>& ref, const std::vector<int>& hyp);

// Geometric mean of clipped unigram and bigram precision with a brevity
// penalty. Falls back to unigram precision when either side has no bigram.
double bleu2(const std::vector<int>& ref, const std::vector<int>& hyp);

// Conventions: zero-vs-zero is 1, zero-vs-nonzero is 0.
double cosine_similarity(const Vector& u, const Vector& v);

// Multinomial naive Bayes over the corpus vocabulary with additive
// smoothing. Fit and prediction are deterministic; posterior ties break
// toward the lexicographically smallest label.
class TinyClassifier {
 public:
  static TinyClassifier fit(const Corpus& corpus, double smoothing = 1.0);

  std::string classify(const std::string& text) const;
  // log P(class) + sum log P(token | class), keyed by label.
  std::map<std::string, double> log_posteriors(const std::string& text) const;
  double accuracy(const Corpus& corpus) const;
  const Vocab& vocab() const { return vocab_; }

 private:
  Vocab vocab_;
  std::vector<std::string> labels_;       // sorted
  std::vector<double> log_prior_;         // per label
  std::vector<Vector> log_likelihood_;    // per label, over vocab ids
  double smoothing_ = 1.0;
};

struct SweepResult {
  std::vector<MetricRecord> records;    // trial rows, (snr index, seed index) order
  std::vector<MetricRecord> summaries;  // per-snr means, seed == -1
  double cliff = 0.0;                   // max accuracy lost between adjacent SNRs
};

// Largest drop in mean accuracy when stepping down between adjacent SNR
// points; zero for a fully flat or improving profile.
double cliff_statistic(const std::vector<double>& snr_sorted,
                       const std::vector<double>& mean_accuracy);

// Full-corpus round trips for every (snr, seed) pair. Failures inside a
// trial are counted in failed_trials and the sweep continues.
SweepResult snr_sweep(const Corpus& corpus, Stack& stack, ChannelType channel,
                      const std::vector<double>& snr_list, int n_seeds,
                      std::uint64_t master_seed,
                      const TinyClassifier* classifier = nullptr);

// Frozen schema:
// snr_db,seed,channel,token_acc,bleu2,cosine,downstream_acc,compression_ratio,failed_trials
std::string sweep_csv(const SweepResult& result);

}  // namespace semcom
