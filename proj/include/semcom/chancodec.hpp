#pragma once

#include <string>
#include <vector>

#include "semcom/rng.hpp"
#include "semcom/types.hpp"

namespace semcom {

struct ChanCodecConfig {
  int d = 48;
  int hidden = 32;
  int k = 16;  // code width per position; k = d/3, must be even
  void validate() const;
};

struct DenseLayer {
  Matrix w;
  Vector b;
};

struct ChanCodecParams {
  ChanCodecConfig config;
  DenseLayer enc1, enc2;  // d -> hidden (gelu) -> k (linear)
  DenseLayer dec1, dec2;  // k -> hidden (gelu) -> d (linear)

  static ChanCodecParams init(const ChanCodecConfig& config, Rng& rng);
  static ChanCodecParams zeros(const ChanCodecConfig& config);

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
    auto layer = [&f](const std::string& prefix, auto& dl) {
      f(prefix + ".w", dl.w.data(), dl.w.rows(), dl.w.cols());
      f(prefix + ".b", dl.b.data(), dl.b.size(), Index{1});
    };
    layer("enc1", self.enc1);
    layer("enc2", self.enc2);
    layer("dec1", self.dec1);
    layer("dec2", self.dec2);
  }
};

struct ChannelSymbols {
  CVector symbols;
  bool degenerate = false;  // all-zero input passed through unnormalized
};

struct ChanEncodeCache {
  Matrix in;
  Matrix h_pre, h;
  Matrix code;
  Vector real_flat;  // pre-normalization
  Vector normalized;
  double power = 0.0;
  bool degenerate = false;
};

struct ChanDecodeCache {
  Matrix code;
  Matrix h_pre, h;
};

// Consecutive real pairs become (re, im); length must be even.
CVector pack_complex(const Vector& reals);
Vector unpack_complex(const CVector& symbols);

// Scale to unit mean power |y|^2; all-zero input is passed through with the
// degenerate flag set.
ChannelSymbols power_normalize(const CVector& symbols);

ChannelSymbols channel_encode(const Matrix& features,
                              const ChanCodecParams& params);
ChannelSymbols channel_encode(const Matrix& features,
                              const ChanCodecParams& params,
                              ChanEncodeCache& cache);
void channel_encode_backward(const ChanEncodeCache& cache,
                             const ChanCodecParams& params,
                             const CVector& d_symbols, Matrix& d_features,
                             ChanCodecParams& grads);

Matrix channel_decode(const CVector& symbols, const ChanCodecParams& params);
Matrix channel_decode(const CVector& symbols, const ChanCodecParams& params,
                      ChanDecodeCache& cache);
void channel_decode_backward(const ChanDecodeCache& cache,
                             const ChanCodecParams& params,
                             const Matrix& d_features, CVector& d_symbols,
                             ChanCodecParams& grads);

// InfoNCE-style lower bound on mutual information between paired samples,
// cosine critic with temperature tau, negatives drawn cyclically in batch.
// The estimate never exceeds ln(negatives_per_pair + 1).
double mi_lower_bound(const Matrix& x_samples, const Matrix& y_samples,
                      int negatives_per_pair, double tau = 0.1);

// Trainable variant: critic compares x * wc against y, and gradients flow to
// both sample sets and the projection.
struct MiEstimate {
  double value = 0.0;
  Matrix d_x, d_y, d_wc;
};
MiEstimate mi_lower_bound_grad(const Matrix& x_samples, const Matrix& y_samples,
                               const Matrix& wc, int negatives_per_pair,
                               double tau = 0.1);

// Full-batch Adam on noiseless decode(encode(x)) reconstruction; returns the
// final mean squared error per element.
double pretrain_autoencoder(ChanCodecParams& params,
                            const std::vector<Matrix>& features, int epochs,
                            double lr);

}  // namespace semcom
