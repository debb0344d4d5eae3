#include "semcom/optim.hpp"

#include <cmath>

namespace semcom {

void Adam::update(const std::string& name, double* w, const double* g,
                  Index n) {
  if (t_ < 1) throw RuntimeFailure("Adam::update before begin_step");
  Slot& slot = slots_[name];
  if (slot.m.size() != n) {
    slot.m = Vector::Zero(n);
    slot.v = Vector::Zero(n);
  }
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (Index i = 0; i < n; ++i) {
    slot.m[i] = config_.beta1 * slot.m[i] + (1.0 - config_.beta1) * g[i];
    slot.v[i] = config_.beta2 * slot.v[i] + (1.0 - config_.beta2) * g[i] * g[i];
    const double mhat = slot.m[i] / bc1;
    const double vhat = slot.v[i] / bc2;
    w[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
  }
}

}  // namespace semcom
