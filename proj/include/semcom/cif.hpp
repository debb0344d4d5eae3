#pragma once

#include <array>
#include <vector>

#include "semcom/types.hpp"

namespace semcom {

// Frame-weight head: causal width-3 1-D convolution over the frame axis,
// then a linear reduction and a per-step squash into (0,1).
struct CifHeadParams {
  std::array<Matrix, 3> taps;  // taps[k] applies to frame t-k, each d x c
  Vector conv_bias;            // c
  Vector lin_w;                // c
  double lin_b = 0.0;
  // Softmax over the time axis instead of per-step sigmoid. Kept for
  // comparison only: it pins total mass to one segment.
  bool softmax_over_time = false;

  static CifHeadParams zeros(Index d, Index c);
};

struct Segment {
  Vector vector;
  Index first_frame = 0;
  Index last_frame = 0;
  double consumed_weight = 0.0;
  bool tail = false;
};

inline constexpr double kDefaultTailThreshold = 0.5;

// One weight per frame, each in (0,1).
Vector predict_weights(const Matrix& features, const CifHeadParams& head);

// Integrate weights in order; each time the accumulator reaches 1 the
// crossing frame's weight is split, the weighted sum fires as a segment,
// and the remainder carries forward. A final partial accumulation fires as
// a tail segment (rescaled to unit weight) iff it reaches tail_threshold.
std::vector<Segment> cif_aggregate(const Vector& weights,
                                   const Matrix& vectors,
                                   double tail_threshold = kDefaultTailThreshold);

}  // namespace semcom
