#include "semcom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace semcom {

double compression_ratio(long long original_bytes, long long compressed_bytes) {
  if (original_bytes <= 0)
    throw InvalidArgument("compression_ratio: original size must be positive");
  if (compressed_bytes > original_bytes)
    throw InvalidArgument("compression_ratio: compressed exceeds original");
  if (compressed_bytes < 0)
    throw InvalidArgument("compression_ratio: negative compressed size");
  return static_cast<double>(original_bytes - compressed_bytes) /
         static_cast<double>(original_bytes);
}

double token_accuracy(const std::vector<int>& ref, const std::vector<int>& hyp) {
  const std::size_t longest = std::max(ref.size(), hyp.size());
  if (longest == 0) return 1.0;  // two empty sequences are identical
  std::size_t matches = 0;
  const std::size_t shared = std::min(ref.size(), hyp.size());
  for (std::size_t i = 0; i < shared; ++i)
    if (ref[i] == hyp[i]) ++matches;
  return static_cast<double>(matches) / static_cast<double>(longest);
}

namespace {

double clipped_ngram_precision(const std::vector<int>& ref,
                               const std::vector<int>& hyp, std::size_t n) {
  if (hyp.size() < n) return 0.0;
  std::map<std::vector<int>, long> ref_counts;
  for (std::size_t i = 0; i + n <= ref.size(); ++i)
    ++ref_counts[std::vector<int>(ref.begin() + i, ref.begin() + i + n)];
  std::map<std::vector<int>, long> hyp_counts;
  for (std::size_t i = 0; i + n <= hyp.size(); ++i)
    ++hyp_counts[std::vector<int>(hyp.begin() + i, hyp.begin() + i + n)];
  long clipped = 0, total = 0;
  for (const auto& [gram, count] : hyp_counts) {
    auto it = ref_counts.find(gram);
    clipped += std::min(count, it == ref_counts.end() ? 0L : it->second);
    total += count;
  }
  return total == 0 ? 0.0 : static_cast<double>(clipped) / static_cast<double>(total);
}

}  // namespace

double bleu2(const std::vector<int>& ref, const std::vector<int>& hyp) {
  if (hyp.empty()) return ref.empty() ? 1.0 : 0.0;
  const double bp =
      hyp.size() >= ref.size()
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(hyp.size()));
  const double p1 = clipped_ngram_precision(ref, hyp, 1);
  if (ref.size() < 2 || hyp.size() < 2) return bp * p1;
  const double p2 = clipped_ngram_precision(ref, hyp, 2);
  return bp * std::sqrt(p1 * p2);
}

double cosine_similarity(const Vector& u, const Vector& v) {
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 && nv == 0.0) return 1.0;
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

TinyClassifier TinyClassifier::fit(const Corpus& corpus, double smoothing) {
  if (smoothing <= 0.0) throw InvalidArgument("fit_classifier: smoothing must be positive");
  Corpus labeled;
  std::set<std::string> label_set;
  for (const auto& s : corpus.sentences) {
    if (!s.label) continue;
    labeled.sentences.push_back(s);
    label_set.insert(*s.label);
  }
  if (label_set.size() < 2)
    throw InvalidArgument("fit_classifier: need at least two labeled classes");

  TinyClassifier clf;
  clf.smoothing_ = smoothing;
  clf.vocab_ = build_vocab(labeled, 1);
  clf.labels_.assign(label_set.begin(), label_set.end());

  const Index v = clf.vocab_.size();
  const auto n_labels = clf.labels_.size();
  std::vector<Vector> counts(n_labels, Vector::Zero(v));
  std::vector<long> docs(n_labels, 0);
  for (const auto& s : labeled.sentences) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(clf.labels_.begin(), clf.labels_.end(), *s.label) -
        clf.labels_.begin());
    counts[idx] += bow_vector(s.text, clf.vocab_);
    ++docs[idx];
  }
  const double total_docs = static_cast<double>(labeled.sentences.size());
  for (std::size_t i = 0; i < n_labels; ++i) {
    clf.log_prior_.push_back(std::log(static_cast<double>(docs[i]) / total_docs));
    const double denom = counts[i].sum() + smoothing * static_cast<double>(v);
    clf.log_likelihood_.push_back(
        ((counts[i].array() + smoothing) / denom).log().matrix());
  }
  return clf;
}

std::map<std::string, double> TinyClassifier::log_posteriors(
    const std::string& text) const {
  const Vector bow = bow_vector(text, vocab_);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    out[labels_[i]] = log_prior_[i] + bow.dot(log_likelihood_[i]);
  return out;
}

std::string TinyClassifier::classify(const std::string& text) const {
  const auto scores = log_posteriors(text);
  // std::map iterates labels in ascending order, so strictly-greater keeps
  // the lexicographically smallest label on ties.
  auto best = scores.begin();
  for (auto it = std::next(scores.begin()); it != scores.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

double TinyClassifier::accuracy(const Corpus& corpus) const {
  long total = 0, correct = 0;
  for (const auto& s : corpus.sentences) {
    if (!s.label) continue;
    ++total;
    if (classify(s.text) == *s.label) ++correct;
  }
  if (total == 0) throw InvalidArgument("accuracy: corpus has no labels");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double cliff_statistic(const std::vector<double>& snr_sorted,
                       const std::vector<double>& mean_accuracy) {
  if (snr_sorted.size() != mean_accuracy.size())
    throw InvalidArgument("cliff_statistic: length mismatch");
  double cliff = 0.0;
  for (std::size_t i = 0; i + 1 < mean_accuracy.size(); ++i)
    cliff = std::max(cliff, mean_accuracy[i + 1] - mean_accuracy[i]);
  return cliff;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "snr_db,seed,channel,token_acc,bleu2,cosine,downstream_acc,"
      "compression_ratio,failed_trials\n";
  char line[256];
  auto emit = [&](const MetricRecord& r) {
    std::snprintf(line, sizeof(line), "%.6g,%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%ld\n",
                  r.snr_db, r.seed, channel_name(r.channel), r.token_accuracy,
                  r.bleu2, r.cosine, r.downstream_accuracy, r.compression_ratio,
                  r.failed_trials);
    out += line;
  };
  for (const auto& r : result.records) emit(r);
  for (const auto& r : result.summaries) emit(r);
  return out;
}

}  // namespace semcom
