#pragma once

#include <string>

#include "semcom/text.hpp"
#include "semcom/types.hpp"

namespace semcom {

class KbBackend;

enum class SnrClass { Low = 0, Mid = 1, High = 2 };

const char* snr_class_name(SnrClass c);

// Three-rule Sugeno controller parameters. Antecedents are generalized
// bell curves over SNR in dB; consequents are first-order polynomials.
struct FuzzyParams {
  Eigen::Vector3d a{5.0, 5.0, 5.0};
  Eigen::Vector3d b{2.0, 2.0, 2.0};
  Eigen::Vector3d c{0.0, 10.0, 20.0};  // dB, strictly ascending
  Eigen::Vector3d p{0.0, 0.0, 0.0};
  Eigen::Vector3d q{0.75, 0.85, 1.0};

  void validate() const;  // a > 0, b >= 1, c ascending
};

// Per-layer intermediate values of one forward evaluation.
struct LayerTrace {
  Eigen::Vector3d memberships;  // bell values, each in (0, 1]
  Eigen::Vector3d weights;      // membership * snr, recorded unclamped
  Eigen::Vector3d normalized;   // sums to 1
  Eigen::Vector3d sugeno;       // normalized * (p*snr + q)
  Eigen::Vector3d probs;        // softmax, sums to 1
  bool degenerate = false;      // snr == 0: fell back to membership shares
  bool negative_weights = false;
};

struct PromptDirective {
  SnrClass snr_class = SnrClass::High;
  double lo = 1.0;
  double hi = 1.0;
  double recommended_ratio = 1.0;
};

// Generalized bell: 1 / (1 + ((x-c)/a)^(2b)).
double membership(double x_db, double a, double b, double c);

LayerTrace controller_forward(double snr_db, const FuzzyParams& params);

PromptDirective directive_for(double snr_db, const FuzzyParams& params);

// Target word-count ratio band for a class.
void class_ratio_range(SnrClass c, double& lo, double& hi);

struct TuneOptions {
  int passes = 2;
  bool tune_antecedents = false;
  std::vector<double> p_grid{-0.02, -0.01, 0.0, 0.01, 0.02};
  std::vector<double> q_grid{0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 1.00};
  std::vector<double> a_grid{3.0, 4.0, 5.0, 6.0, 7.0};
  std::vector<double> c_step_grid{-4.0, -2.0, 0.0, 2.0, 4.0};
};

// Mean cosine similarity between each sentence's bag of words and the bag
// of words after a knowledge-base encode/decode round trip at the given
// SNR points. This is the tuning objective.
double tune_objective(const FuzzyParams& params, const Corpus& corpus,
                      KbBackend& kb, const Vocab& vocab,
                      const std::vector<double>& snr_samples);

// Deterministic coordinate descent over the consequents (and optionally
// antecedents). Never returns parameters scoring below params0; exact
// ties keep the incumbent value.
FuzzyParams tune(const FuzzyParams& params0, const Corpus& corpus, KbBackend& kb,
                 const Vocab& vocab, const std::vector<double>& snr_samples,
                 const TuneOptions& options = {});

}  // namespace semcom
