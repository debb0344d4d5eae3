#include "semcom/fuzzy.hpp"

#include <cmath>

#include "semcom/kb.hpp"
#include "semcom/metrics.hpp"

namespace semcom {

double tune_objective(const FuzzyParams& params, const Corpus& corpus,
                      KbBackend& kb, const Vocab& vocab,
                      const std::vector<double>& snr_samples) {
  if (corpus.sentences.empty()) throw InvalidArgument("tune: empty corpus");
  if (snr_samples.empty()) throw InvalidArgument("tune: need at least one snr sample");
  double total = 0.0;
  long count = 0;
  for (double snr : snr_samples) {
    const PromptDirective directive = directive_for(snr, params);
    for (const auto& sentence : corpus.sentences) {
      const KbResult enc = kb.encode(sentence.text, directive);
      const KbResult dec = kb.decode(enc.text, "");
      total += cosine_similarity(bow_vector(sentence.text, vocab),
                                 bow_vector(dec.text, vocab));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

FuzzyParams tune(const FuzzyParams& params0, const Corpus& corpus, KbBackend& kb,
                 const Vocab& vocab, const std::vector<double>& snr_samples,
                 const TuneOptions& options) {
  params0.validate();
  FuzzyParams best = params0;
  double best_score = tune_objective(best, corpus, kb, vocab, snr_samples);

  auto consider = [&](const FuzzyParams& cand) {
    FuzzyParams checked = cand;
    try {
      checked.validate();
    } catch (const InvalidArgument&) {
      return;
    }
    const double score = tune_objective(checked, corpus, kb, vocab, snr_samples);
    if (score > best_score) {
      best_score = score;
      best = checked;
    }
  };

  for (int pass = 0; pass < options.passes; ++pass) {
    for (int i = 0; i < 3; ++i) {
      for (double qv : options.q_grid) {
        FuzzyParams cand = best;
        cand.q[i] = qv;
        consider(cand);
      }
      for (double pv : options.p_grid) {
        FuzzyParams cand = best;
        cand.p[i] = pv;
        consider(cand);
      }
      if (options.tune_antecedents) {
        for (double av : options.a_grid) {
          FuzzyParams cand = best;
          cand.a[i] = av;
          consider(cand);
        }
        for (double step : options.c_step_grid) {
          FuzzyParams cand = best;
          cand.c[i] = best.c[i] + step;
          consider(cand);
        }
      }
    }
  }
  return best;
}

}  // namespace semcom
