#include "semcom/fuzzy.hpp"

#include <algorithm>
#include <cmath>

namespace semcom {

const char* snr_class_name(SnrClass c) {
  switch (c) {
    case SnrClass::Low: return "low";
    case SnrClass::Mid: return "mid";
    case SnrClass::High: return "high";
  }
  return "?";
}

void FuzzyParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(a[i] > 0.0)) throw InvalidArgument("fuzzy params: a must be positive");
    if (!(b[i] >= 1.0)) throw InvalidArgument("fuzzy params: b must be >= 1");
  }
  if (!(c[0] < c[1] && c[1] < c[2]))
    throw InvalidArgument("fuzzy params: centers must be strictly ascending");
}

double membership(double x_db, double a, double b, double c) {
  if (!(a > 0.0)) throw InvalidArgument("membership: a must be positive");
  const double t = (x_db - c) / a;
  return 1.0 / (1.0 + std::pow(t * t, b));
}

namespace {

Eigen::Vector3d softmax3(const Eigen::Vector3d& v) {
  const double m = v.maxCoeff();
  Eigen::Vector3d e = (v.array() - m).exp();
  return e / e.sum();
}

}  // namespace

LayerTrace controller_forward(double snr_db, const FuzzyParams& params) {
  params.validate();
  LayerTrace t;
  for (int i = 0; i < 3; ++i)
    t.memberships[i] = membership(snr_db, params.a[i], params.b[i], params.c[i]);
  // Rule weights are membership * snr, kept unclamped in the trace. Their
  // normalization is scale- and sign-invariant, so for any nonzero snr the
  // shares reduce to membership shares; at snr == 0 every weight vanishes
  // and membership shares are the declared fallback.
  t.weights = t.memberships * snr_db;
  const double wsum = t.weights.sum();
  if (std::abs(wsum) < 1e-15) {
    t.degenerate = true;
    t.normalized = t.memberships / t.memberships.sum();
  } else {
    t.normalized = t.weights / wsum;
    t.negative_weights = snr_db < 0.0;
  }
  for (int i = 0; i < 3; ++i)
    t.sugeno[i] = t.normalized[i] * (params.p[i] * snr_db + params.q[i]);
  t.probs = softmax3(t.sugeno);
  return t;
}

void class_ratio_range(SnrClass c, double& lo, double& hi) {
  switch (c) {
    case SnrClass::Low: lo = 0.70; hi = 0.80; return;
    case SnrClass::Mid: lo = 0.80; hi = 0.90; return;
    case SnrClass::High: lo = 1.00; hi = 1.00; return;
  }
}

PromptDirective directive_for(double snr_db, const FuzzyParams& params) {
  const LayerTrace t = controller_forward(snr_db, params);
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (t.probs[i] > t.probs[best]) best = i;  // ties keep the lowest index
  PromptDirective d;
  d.snr_class = static_cast<SnrClass>(best);
  class_ratio_range(d.snr_class, d.lo, d.hi);
  d.recommended_ratio = std::clamp(t.sugeno.sum(), d.lo, d.hi);
  return d;
}

}  // namespace semcom
