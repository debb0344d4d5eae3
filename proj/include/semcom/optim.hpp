#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "semcom/types.hpp"

namespace semcom {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}
  void begin_step() { ++t_; }
  void update(const std::string& name, double* w, const double* g, Index n);
  const AdamConfig& config() const { return config_; }
  AdamConfig& config() { return config_; }

 private:
  struct Slot {
    Vector m, v;
  };
  AdamConfig config_;
  std::map<std::string, Slot> slots_;
  long long t_ = 0;
};

template <class Params>
void zero_tensors(Params& p) {
  p.for_each_tensor([](const std::string&, double* d, Index rows, Index cols) {
    std::fill(d, d + rows * cols, 0.0);
  });
}

// One optimizer step over all tensors; params and grads must share layout.
template <class Params>
void adam_step(Adam& opt, Params& params, const Params& grads) {
  opt.begin_step();
  struct Ref {
    const double* g;
    Index n;
  };
  std::vector<Ref> refs;
  grads.for_each_tensor(
      [&refs](const std::string&, const double* g, Index rows, Index cols) {
        refs.push_back({g, rows * cols});
      });
  std::size_t i = 0;
  params.for_each_tensor(
      [&](const std::string& name, double* w, Index rows, Index cols) {
        if (i >= refs.size() || refs[i].n != rows * cols)
          throw InvalidArgument("adam_step: parameter/gradient layout mismatch");
        opt.update(name, w, refs[i].g, rows * cols);
        ++i;
      });
}

}  // namespace semcom
