#include "semcom/semcodec.hpp"

#include <cmath>

#include "semcom/nn.hpp"
#include "semcom/text.hpp"

namespace semcom {

void SemCodecConfig::validate() const {
  if (d <= 0 || layers <= 0 || heads <= 0 || d_ff <= 0 || max_len <= 0)
    throw InvalidArgument("codec config: dimensions must be positive");
  if (d % heads != 0) throw InvalidArgument("codec config: heads must divide d");
  if (vocab < kReservedCount)
    throw InvalidArgument("codec config: vocab smaller than reserved ids");
  if (vocab > 2000) throw InvalidArgument("codec config: vocab above 2000");
}

namespace {

Matrix gaussian_matrix(Index rows, Index cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = stddev * rng.next_gaussian();
  return m;
}

}  // namespace

SemCodecParams SemCodecParams::init(const SemCodecConfig& config, Rng& rng) {
  config.validate();
  const double scale = 0.02;
  SemCodecParams p;
  p.config = config;
  p.embedding = gaussian_matrix(config.vocab, config.d, scale, rng);
  p.positional = gaussian_matrix(config.max_len, config.d, scale, rng);
  p.layers.resize(config.layers);
  for (auto& lp : p.layers) {
    lp.attn.wq = gaussian_matrix(config.d, config.d, scale, rng);
    lp.attn.wk = gaussian_matrix(config.d, config.d, scale, rng);
    lp.attn.wv = gaussian_matrix(config.d, config.d, scale, rng);
    lp.attn.wo = gaussian_matrix(config.d, config.d, scale, rng);
    lp.ff_w1 = gaussian_matrix(config.d, config.d_ff, scale, rng);
    lp.ff_b1 = Vector::Zero(config.d_ff);
    lp.ff_w2 = gaussian_matrix(config.d_ff, config.d, scale, rng);
    lp.ff_b2 = Vector::Zero(config.d);
    lp.ln1_gain = Vector::Ones(config.d);
    lp.ln1_bias = Vector::Zero(config.d);
    lp.ln2_gain = Vector::Ones(config.d);
    lp.ln2_bias = Vector::Zero(config.d);
  }
  p.out_proj = gaussian_matrix(config.d, config.vocab, scale, rng);
  return p;
}

SemCodecParams SemCodecParams::zeros(const SemCodecConfig& config) {
  config.validate();
  SemCodecParams p;
  p.config = config;
  p.embedding = Matrix::Zero(config.vocab, config.d);
  p.positional = Matrix::Zero(config.max_len, config.d);
  p.layers.resize(config.layers);
  for (auto& lp : p.layers) {
    lp.attn.wq = Matrix::Zero(config.d, config.d);
    lp.attn.wk = Matrix::Zero(config.d, config.d);
    lp.attn.wv = Matrix::Zero(config.d, config.d);
    lp.attn.wo = Matrix::Zero(config.d, config.d);
    lp.ff_w1 = Matrix::Zero(config.d, config.d_ff);
    lp.ff_b1 = Vector::Zero(config.d_ff);
    lp.ff_w2 = Matrix::Zero(config.d_ff, config.d);
    lp.ff_b2 = Vector::Zero(config.d);
    lp.ln1_gain = Vector::Zero(config.d);
    lp.ln1_bias = Vector::Zero(config.d);
    lp.ln2_gain = Vector::Zero(config.d);
    lp.ln2_bias = Vector::Zero(config.d);
  }
  p.out_proj = Matrix::Zero(config.d, config.vocab);
  return p;
}

Matrix layer_norm(const Matrix& x, const Vector* gain, const Vector* bias,
                  LnCache* cache) {
  const Index n = x.rows(), d = x.cols();
  if (d == 0) throw InvalidArgument("layer_norm: empty rows");
  Matrix xhat(n, d);
  Vector inv_std(n);
  for (Index i = 0; i < n; ++i) {
    const double mean = x.row(i).mean();
    const double var = (x.row(i).array() - mean).square().mean();
    inv_std[i] = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(i) = ((x.row(i).array() - mean) * inv_std[i]).matrix();
  }
  Matrix out = xhat;
  if (gain) out = (out.array().rowwise() * gain->transpose().array()).matrix();
  if (bias) out = out.rowwise() + bias->transpose();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

void layer_norm_backward(const LnCache& cache, const Vector* gain,
                         const Matrix& d_out, Matrix& d_in, Vector* g_gain,
                         Vector* g_bias) {
  const Index n = d_out.rows(), d = d_out.cols();
  if (g_gain) *g_gain += (d_out.array() * cache.xhat.array()).colwise().sum().transpose().matrix();
  if (g_bias) *g_bias += d_out.colwise().sum().transpose();
  Matrix d_xhat = d_out;
  if (gain)
    d_xhat = (d_xhat.array().rowwise() * gain->transpose().array()).matrix();
  d_in.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    const double m1 = d_xhat.row(i).mean();
    const double m2 = (d_xhat.row(i).array() * cache.xhat.row(i).array()).mean();
    d_in.row(i) = (cache.inv_std[i] *
                   (d_xhat.row(i).array() - m1 - cache.xhat.row(i).array() * m2))
                      .matrix();
  }
}

namespace {

// Multi-head self attention with packed head projections, no biases.
Matrix msa_forward(const Matrix& in, const AttentionParams& ap, int heads,
                   EncoderLayerCache* cache) {
  const Index n = in.rows(), d = in.cols();
  const Index dh = d / heads;
  Matrix q = in * ap.wq, k = in * ap.wk, v = in * ap.wv;
  Matrix concat(n, d);
  std::vector<Matrix> attn(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int h = 0; h < heads; ++h) {
    auto qh = q.middleCols(h * dh, dh);
    auto kh = k.middleCols(h * dh, dh);
    auto vh = v.middleCols(h * dh, dh);
    attn[h] = softmax_rows(qh * kh.transpose() * scale);
    concat.middleCols(h * dh, dh) = attn[h] * vh;
  }
  Matrix out = concat * ap.wo;
  if (cache) {
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->attn = std::move(attn);
    cache->heads_concat = std::move(concat);
  }
  return out;
}

Matrix msa_backward(const EncoderLayerCache& cache, const AttentionParams& ap,
                    int heads, const Matrix& d_msa, AttentionParams& grads) {
  const Index n = cache.in.rows(), d = cache.in.cols();
  const Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  grads.wo += cache.heads_concat.transpose() * d_msa;
  Matrix d_concat = d_msa * ap.wo.transpose();
  Matrix d_q(n, d), d_k(n, d), d_v(n, d);
  for (int h = 0; h < heads; ++h) {
    const Matrix& a = cache.attn[h];
    auto vh = cache.v.middleCols(h * dh, dh);
    auto d_oh = d_concat.middleCols(h * dh, dh);
    d_v.middleCols(h * dh, dh) = a.transpose() * d_oh;
    Matrix d_a = d_oh * vh.transpose();
    // softmax jacobian per row: a .* (d_a - rowsum(d_a .* a))
    Vector row_dot = (d_a.array() * a.array()).rowwise().sum().matrix();
    Matrix d_s =
        (a.array() * (d_a.array().colwise() - row_dot.array())).matrix();
    d_q.middleCols(h * dh, dh) = d_s * cache.k.middleCols(h * dh, dh) * scale;
    d_k.middleCols(h * dh, dh) =
        d_s.transpose() * cache.q.middleCols(h * dh, dh) * scale;
  }
  grads.wq += cache.in.transpose() * d_q;
  grads.wk += cache.in.transpose() * d_k;
  grads.wv += cache.in.transpose() * d_v;
  return d_q * ap.wq.transpose() + d_k * ap.wk.transpose() +
         d_v * ap.wv.transpose();
}

}  // namespace

Matrix encoder_layer(const Matrix& features, const EncoderLayerParams& lp,
                     int heads, EncoderLayerCache* cache) {
  const Index d = lp.attn.wq.rows();
  if (features.cols() != d)
    throw InvalidArgument("encoder_layer: feature width mismatch");
  if (heads <= 0 || d % heads != 0)
    throw InvalidArgument("encoder_layer: heads must divide width");
  EncoderLayerCache local;
  EncoderLayerCache& c = cache ? *cache : local;
  c.in = features;
  Matrix msa = msa_forward(features, lp.attn, heads, &c);
  Matrix m_msa =
      layer_norm(msa + features, &lp.ln1_gain, &lp.ln1_bias, &c.ln1);
  Matrix ff_pre = affine(m_msa, lp.ff_w1, lp.ff_b1);
  Matrix ff_act = gelu(ff_pre);
  Matrix ff_out = affine(ff_act, lp.ff_w2, lp.ff_b2);
  Matrix out = layer_norm(ff_out + m_msa, &lp.ln2_gain, &lp.ln2_bias, &c.ln2);
  if (cache) {
    c.m_msa = std::move(m_msa);
    c.ff_pre = std::move(ff_pre);
    c.ff_act = std::move(ff_act);
  }
  return out;
}

Matrix encoder_layer_backward(const EncoderLayerCache& cache,
                              const EncoderLayerParams& lp, int heads,
                              const Matrix& d_out, EncoderLayerParams& grads) {
  Matrix d_res2;
  layer_norm_backward(cache.ln2, &lp.ln2_gain, d_out, d_res2, &grads.ln2_gain,
                      &grads.ln2_bias);
  // d_res2 flows into both the ff output and the m_msa residual
  Matrix d_act;
  affine_backward(cache.ff_act, lp.ff_w2, d_res2, d_act, grads.ff_w2,
                  grads.ff_b2);
  Matrix d_pre = (d_act.array() * gelu_grad(cache.ff_pre).array()).matrix();
  Matrix d_m_msa;
  affine_backward(cache.m_msa, lp.ff_w1, d_pre, d_m_msa, grads.ff_w1,
                  grads.ff_b1);
  d_m_msa += d_res2;
  Matrix d_res1;
  layer_norm_backward(cache.ln1, &lp.ln1_gain, d_m_msa, d_res1,
                      &grads.ln1_gain, &grads.ln1_bias);
  Matrix d_in = msa_backward(cache, lp.attn, heads, d_res1, grads.attn);
  d_in += d_res1;
  return d_in;
}

namespace {

void check_tokens(const std::vector<int>& tokens, const SemCodecConfig& c) {
  if (tokens.empty()) throw InvalidArgument("semantic_encode: empty tokens");
  if (static_cast<int>(tokens.size()) > c.max_len)
    throw InvalidArgument("semantic_encode: sequence longer than max_len");
  for (int id : tokens)
    if (id < 0 || id >= c.vocab)
      throw InvalidArgument("semantic_encode: token id out of range");
}

}  // namespace

Matrix semantic_encode(const std::vector<int>& tokens,
                       const SemCodecParams& params, SemEncodeCache& cache) {
  const SemCodecConfig& c = params.config;
  check_tokens(tokens, c);
  const Index n = static_cast<Index>(tokens.size());
  Matrix x(n, c.d);
  for (Index t = 0; t < n; ++t)
    x.row(t) = params.embedding.row(tokens[t]) + params.positional.row(t);
  cache.tokens = tokens;
  cache.embedded = x;
  cache.layers.resize(params.layers.size());
  for (std::size_t i = 0; i < params.layers.size(); ++i)
    x = encoder_layer(x, params.layers[i], c.heads, &cache.layers[i]);
  x = layer_norm(x, nullptr, nullptr, &cache.final_ln);
  cache.features = x;
  return x;
}

Matrix semantic_encode(const std::vector<int>& tokens,
                       const SemCodecParams& params) {
  SemEncodeCache cache;
  return semantic_encode(tokens, params, cache);
}

void semantic_encode_backward(const SemEncodeCache& cache,
                              const SemCodecParams& params,
                              const Matrix& d_features, SemCodecParams& grads) {
  Matrix d = d_features;
  Matrix d_prev;
  layer_norm_backward(cache.final_ln, nullptr, d, d_prev, nullptr, nullptr);
  d = std::move(d_prev);
  for (std::size_t i = params.layers.size(); i-- > 0;)
    d = encoder_layer_backward(cache.layers[i], params.layers[i],
                               params.config.heads, d, grads.layers[i]);
  for (Index t = 0; t < d.rows(); ++t) {
    grads.embedding.row(cache.tokens[t]) += d.row(t);
    grads.positional.row(t) += d.row(t);
  }
}

Matrix semantic_decode(const Matrix& features, const SemCodecParams& params) {
  if (features.cols() != params.config.d)
    throw InvalidArgument("semantic_decode: feature width mismatch");
  return features * params.out_proj;
}

void semantic_decode_backward(const Matrix& features,
                              const SemCodecParams& params,
                              const Matrix& d_logits, Matrix& d_features,
                              SemCodecParams& grads) {
  if (features.cols() != params.config.d)
    throw InvalidArgument("semantic_decode: feature width mismatch");
  grads.out_proj += features.transpose() * d_logits;
  d_features = d_logits * params.out_proj.transpose();
}

std::vector<int> greedy_decode(const Matrix& logits) {
  std::vector<int> out(logits.rows());
  for (Index i = 0; i < logits.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < logits.cols(); ++j)
      if (logits(i, j) > logits(i, best)) best = j;  // ties keep lowest id
    out[i] = static_cast<int>(best);
  }
  return out;
}

double ce_loss(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw InvalidArgument("ce_loss: length mismatch");
  double loss = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (q[i] != 0.0 && q[i] != 1.0)
      throw InvalidArgument("ce_loss: targets must be 0 or 1");
    const double pi = std::min(std::max(p[i], kProbEps), 1.0 - kProbEps);
    loss -= q[i] * std::log(pi) + (1.0 - q[i]) * std::log(1.0 - pi);
  }
  return loss;
}

namespace {

void check_targets(const Matrix& logits, const std::vector<int>& targets) {
  if (static_cast<Index>(targets.size()) != logits.rows())
    throw InvalidArgument("sequence loss: target length mismatch");
  for (int id : targets)
    if (id < 0 || id >= logits.cols())
      throw InvalidArgument("sequence loss: target id out of range");
}

}  // namespace

double sequence_ce(const Matrix& logits, const std::vector<int>& targets) {
  check_targets(logits, targets);
  Matrix probs = softmax_rows(logits);
  Vector p(logits.rows());
  for (Index i = 0; i < logits.rows(); ++i) p[i] = probs(i, targets[i]);
  return ce_loss(p, Vector::Ones(logits.rows()));
}

Matrix sequence_ce_backward(const Matrix& logits,
                            const std::vector<int>& targets) {
  check_targets(logits, targets);
  Matrix probs = softmax_rows(logits);
  Matrix d = Matrix::Zero(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double p = probs(i, targets[i]);
    if (p <= kProbEps || p >= 1.0 - kProbEps) continue;  // clamped: flat
    d.row(i) = probs.row(i);
    d(i, targets[i]) -= 1.0;
  }
  return d;
}

double categorical_ce(const Matrix& logits, const std::vector<int>& targets) {
  check_targets(logits, targets);
  double loss = 0.0;
  for (Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    loss += lse - logits(i, targets[i]);
  }
  return loss;
}

}  // namespace semcom
