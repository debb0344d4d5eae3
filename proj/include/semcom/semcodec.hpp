#pragma once

#include <string>
#include <vector>

#include "semcom/rng.hpp"
#include "semcom/types.hpp"

namespace semcom {

// Probabilities are clamped to [kProbEps, 1 - kProbEps] before any logarithm.
inline constexpr double kProbEps = 1e-12;
inline constexpr double kLayerNormEps = 1e-12;

struct SemCodecConfig {
  int d = 48;
  int layers = 2;
  int heads = 4;
  int d_ff = 96;
  int max_len = 32;
  int vocab = 0;
  void validate() const;
};

struct AttentionParams {
  Matrix wq, wk, wv, wo;  // each d x d, heads packed along columns
};

struct EncoderLayerParams {
  AttentionParams attn;
  Matrix ff_w1;  // d x d_ff
  Vector ff_b1;
  Matrix ff_w2;  // d_ff x d
  Vector ff_b2;
  Vector ln1_gain, ln1_bias;
  Vector ln2_gain, ln2_bias;
};

struct SemCodecParams {
  SemCodecConfig config;
  Matrix embedding;   // vocab x d
  Matrix positional;  // max_len x d
  std::vector<EncoderLayerParams> layers;
  Matrix out_proj;  // d x vocab, no bias

  static SemCodecParams init(const SemCodecConfig& config, Rng& rng);
  static SemCodecParams zeros(const SemCodecConfig& config);

  // Visits every trainable tensor as (name, data, rows, cols) in a fixed
  // order shared by params, gradients, and checkpoints.
  template <class F>
  void for_each_tensor(F&& f) {
    visit(*this, f);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    visit(*this, f);
  }

 private:
  template <class Self, class F>
  static void visit(Self& self, F&& f) {
    auto mat = [&f](const std::string& name, auto& m) {
      f(name, m.data(), m.rows(), m.cols());
    };
    auto vec = [&f](const std::string& name, auto& v) {
      f(name, v.data(), v.size(), Index{1});
    };
    mat("embedding", self.embedding);
    mat("positional", self.positional);
    for (std::size_t i = 0; i < self.layers.size(); ++i) {
      const std::string p = "layer" + std::to_string(i) + ".";
      auto& lp = self.layers[i];
      mat(p + "wq", lp.attn.wq);
      mat(p + "wk", lp.attn.wk);
      mat(p + "wv", lp.attn.wv);
      mat(p + "wo", lp.attn.wo);
      mat(p + "ff_w1", lp.ff_w1);
      vec(p + "ff_b1", lp.ff_b1);
      mat(p + "ff_w2", lp.ff_w2);
      vec(p + "ff_b2", lp.ff_b2);
      vec(p + "ln1_gain", lp.ln1_gain);
      vec(p + "ln1_bias", lp.ln1_bias);
      vec(p + "ln2_gain", lp.ln2_gain);
      vec(p + "ln2_bias", lp.ln2_bias);
    }
    mat("out_proj", self.out_proj);
  }
};

struct LnCache {
  Matrix xhat;
  Vector inv_std;
};

struct EncoderLayerCache {
  Matrix in;
  Matrix q, k, v;
  std::vector<Matrix> attn;  // per head, rows sum to 1
  Matrix heads_concat;
  LnCache ln1;
  Matrix m_msa;
  Matrix ff_pre, ff_act;
  LnCache ln2;
};

struct SemEncodeCache {
  std::vector<int> tokens;
  Matrix embedded;
  std::vector<EncoderLayerCache> layers;
  LnCache final_ln;
  Matrix features;
};

// Row-wise layer norm; gain/bias may be null for the parameter-free form.
Matrix layer_norm(const Matrix& x, const Vector* gain, const Vector* bias,
                  LnCache* cache);
void layer_norm_backward(const LnCache& cache, const Vector* gain,
                         const Matrix& d_out, Matrix& d_in, Vector* g_gain,
                         Vector* g_bias);

// Post-norm residual block: norm(msa(x) + x), then norm(ff + residual).
Matrix encoder_layer(const Matrix& features, const EncoderLayerParams& lp,
                     int heads, EncoderLayerCache* cache = nullptr);
Matrix encoder_layer_backward(const EncoderLayerCache& cache,
                              const EncoderLayerParams& lp, int heads,
                              const Matrix& d_out, EncoderLayerParams& grads);

Matrix semantic_encode(const std::vector<int>& tokens,
                       const SemCodecParams& params);
Matrix semantic_encode(const std::vector<int>& tokens,
                       const SemCodecParams& params, SemEncodeCache& cache);
void semantic_encode_backward(const SemEncodeCache& cache,
                              const SemCodecParams& params,
                              const Matrix& d_features, SemCodecParams& grads);

Matrix semantic_decode(const Matrix& features, const SemCodecParams& params);
void semantic_decode_backward(const Matrix& features,
                              const SemCodecParams& params,
                              const Matrix& d_logits, Matrix& d_features,
                              SemCodecParams& grads);

std::vector<int> greedy_decode(const Matrix& logits);

// Per-position binary cross entropy over reference probabilities:
// -sum_l [q log p + (1-q) log(1-p)], q in {0,1}.
double ce_loss(const Vector& p, const Vector& q);

// Training loss: ce_loss with q = 1 at each position's reference token and
// p = softmax probability of that token.
double sequence_ce(const Matrix& logits, const std::vector<int>& targets);
Matrix sequence_ce_backward(const Matrix& logits,
                            const std::vector<int>& targets);

// Diagnostic only: categorical cross entropy through log-sum-exp.
double categorical_ce(const Matrix& logits, const std::vector<int>& targets);

}  // namespace semcom
