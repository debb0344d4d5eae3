#include <algorithm>

#include "semcom/metrics.hpp"
#include "semcom/pipeline.hpp"
#include "semcom/rng.hpp"

namespace semcom {

namespace {

MetricRecord rollup_trial(const std::vector<RoundTripRecord>& records,
                          double snr_db, int seed, ChannelType channel,
                          const Vocab& vocab,
                          const Corpus& corpus,
                          const TinyClassifier* classifier) {
  MetricRecord row;
  row.snr_db = snr_db;
  row.seed = seed;
  row.channel = channel;

  double acc = 0.0, bleu = 0.0, cos = 0.0, ratio = 0.0;
  long n = 0, ratio_n = 0, label_hits = 0, label_n = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    acc += token_accuracy(rec.sent_tokens.ids, rec.received_tokens.ids);
    bleu += bleu2(rec.sent_tokens.ids, rec.received_tokens.ids);
    cos += cosine_similarity(bow_vector(rec.sent_text, vocab),
                             bow_vector(rec.received_text, vocab));
    ++n;
    if (rec.failed) ++row.failed_trials;
    const long long original =
        static_cast<long long>(rec.sent_text.size());
    const long long wire = static_cast<long long>(rec.wire_text.size());
    // transmit failures leave no wire text; expansion cannot happen with
    // the word-dropping encoder but is skipped defensively
    if (original > 0 && wire > 0 && wire <= original) {
      ratio += compression_ratio(original, wire);
      ++ratio_n;
    }
    if (classifier && corpus.sentences[i].label) {
      ++label_n;
      if (!rec.failed &&
          classifier->classify(rec.received_text) == *corpus.sentences[i].label)
        ++label_hits;
    }
  }
  if (n > 0) {
    row.token_accuracy = acc / static_cast<double>(n);
    row.bleu2 = bleu / static_cast<double>(n);
    row.cosine = cos / static_cast<double>(n);
  }
  if (ratio_n > 0) row.compression_ratio = ratio / static_cast<double>(ratio_n);
  if (label_n > 0)
    row.downstream_accuracy =
        static_cast<double>(label_hits) / static_cast<double>(label_n);
  return row;
}

}  // namespace

SweepResult snr_sweep(const Corpus& corpus, Stack& stack, ChannelType channel,
                      const std::vector<double>& snr_list, int n_seeds,
                      std::uint64_t master_seed,
                      const TinyClassifier* classifier) {
  if (corpus.sentences.empty()) throw InvalidArgument("snr_sweep: empty corpus");
  if (snr_list.empty()) throw InvalidArgument("snr_sweep: empty snr list");
  if (n_seeds < 1) throw InvalidArgument("snr_sweep: need at least one seed");
  stack.validate();

  SweepResult result;
  for (std::size_t si = 0; si < snr_list.size(); ++si) {
    const double snr = snr_list[si];
    MetricRecord summary;
    summary.snr_db = snr;
    summary.seed = -1;
    summary.channel = channel;
    for (int seed_idx = 0; seed_idx < n_seeds; ++seed_idx) {
      const std::uint64_t trial_seed = derive_seed(
          master_seed, "sweep",
          si * 1000003ULL + static_cast<std::uint64_t>(seed_idx));
      const auto trips = run_round_trip(corpus, stack, channel, snr, trial_seed);
      const MetricRecord row = rollup_trial(trips, snr, seed_idx, channel,
                                            stack.vocab, corpus, classifier);
      summary.token_accuracy += row.token_accuracy;
      summary.bleu2 += row.bleu2;
      summary.cosine += row.cosine;
      summary.downstream_accuracy += row.downstream_accuracy;
      summary.compression_ratio += row.compression_ratio;
      summary.failed_trials += row.failed_trials;
      result.records.push_back(row);
    }
    summary.token_accuracy /= n_seeds;
    summary.bleu2 /= n_seeds;
    summary.cosine /= n_seeds;
    summary.downstream_accuracy /= n_seeds;
    summary.compression_ratio /= n_seeds;
    result.summaries.push_back(summary);
  }

  std::vector<std::size_t> order(result.summaries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.summaries[a].snr_db < result.summaries[b].snr_db;
  });
  std::vector<double> snrs, accs;
  for (std::size_t i : order) {
    snrs.push_back(result.summaries[i].snr_db);
    accs.push_back(result.summaries[i].token_accuracy);
  }
  result.cliff = cliff_statistic(snrs, accs);
  return result;
}

}  // namespace semcom
