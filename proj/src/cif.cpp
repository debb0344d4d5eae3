#include "semcom/cif.hpp"

#include <cmath>

namespace semcom {

CifHeadParams CifHeadParams::zeros(Index d, Index c) {
  CifHeadParams h;
  for (auto& t : h.taps) t = Matrix::Zero(d, c);
  h.conv_bias = Vector::Zero(c);
  h.lin_w = Vector::Zero(c);
  h.lin_b = 0.0;
  return h;
}

Vector predict_weights(const Matrix& features, const CifHeadParams& head) {
  const Index t_frames = features.rows();
  if (t_frames == 0) throw InvalidArgument("predict_weights: empty features");
  const Index d = features.cols();
  for (const auto& tap : head.taps)
    if (tap.rows() != d)
      throw InvalidArgument("predict_weights: tap width does not match features");

  Vector scores(t_frames);
  for (Index t = 0; t < t_frames; ++t) {
    Vector u = head.conv_bias;
    for (Index k = 0; k < 3; ++k) {
      const Index src = t - k;  // frames before the first are zero
      if (src < 0) continue;
      u.noalias() += head.taps[static_cast<std::size_t>(k)].transpose() *
                     features.row(src).transpose();
    }
    scores[t] = head.lin_w.dot(u) + head.lin_b;
  }

  if (head.softmax_over_time) {
    const double m = scores.maxCoeff();
    Vector e = (scores.array() - m).exp();
    return e / e.sum();
  }
  return scores.unaryExpr([](double s) { return 1.0 / (1.0 + std::exp(-s)); });
}

std::vector<Segment> cif_aggregate(const Vector& weights, const Matrix& vectors,
                                   double tail_threshold) {
  if (weights.size() != vectors.rows())
    throw InvalidArgument("cif_aggregate: weights and vectors disagree on length");
  for (Index t = 0; t < weights.size(); ++t)
    if (weights[t] < 0.0 || weights[t] > 1.0)
      throw InvalidArgument("cif_aggregate: weights must lie in [0,1]");

  std::vector<Segment> segments;
  const Index d = vectors.cols();
  double acc = 0.0;
  Vector cur = Vector::Zero(d);
  Index first = 0;
  for (Index t = 0; t < weights.size(); ++t) {
    const double w = weights[t];
    if (acc + w >= 1.0) {
      const double share = 1.0 - acc;
      Segment seg;
      seg.vector = cur + share * vectors.row(t).transpose();
      seg.first_frame = first;
      seg.last_frame = t;
      seg.consumed_weight = 1.0;
      segments.push_back(std::move(seg));
      const double rem = w - share;
      acc = rem;
      cur = rem * vectors.row(t).transpose();
      first = rem > 0.0 ? t : t + 1;
    } else {
      acc += w;
      cur.noalias() += w * vectors.row(t).transpose();
    }
  }
  if (acc >= tail_threshold && acc > 0.0) {
    Segment tail;
    tail.vector = cur / acc;  // rescaled to unit weight
    tail.first_frame = first;
    tail.last_frame = weights.size() - 1;
    tail.consumed_weight = acc;
    tail.tail = true;
    segments.push_back(std::move(tail));
  }
  return segments;
}

}  // namespace semcom
