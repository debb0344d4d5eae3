#include "semcom/chancodec.hpp"

#include <cmath>

#include "semcom/nn.hpp"
#include "semcom/optim.hpp"

namespace semcom {

void ChanCodecConfig::validate() const {
  if (d <= 0 || hidden <= 0 || k <= 0)
    throw InvalidArgument("channel codec config: dimensions must be positive");
  if (k % 2 != 0)
    throw InvalidArgument("channel codec config: code width must be even");
  if (3 * k != d)
    throw InvalidArgument("channel codec config: code width must be d/3");
}

namespace {

Matrix xavier(Index fan_in, Index fan_out, Rng& rng) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (Index i = 0; i < fan_in; ++i)
    for (Index j = 0; j < fan_out; ++j) m(i, j) = stddev * rng.next_gaussian();
  return m;
}

}  // namespace

ChanCodecParams ChanCodecParams::init(const ChanCodecConfig& config, Rng& rng) {
  config.validate();
  ChanCodecParams p;
  p.config = config;
  p.enc1 = {xavier(config.d, config.hidden, rng), Vector::Zero(config.hidden)};
  p.enc2 = {xavier(config.hidden, config.k, rng), Vector::Zero(config.k)};
  p.dec1 = {xavier(config.k, config.hidden, rng), Vector::Zero(config.hidden)};
  p.dec2 = {xavier(config.hidden, config.d, rng), Vector::Zero(config.d)};
  return p;
}

ChanCodecParams ChanCodecParams::zeros(const ChanCodecConfig& config) {
  config.validate();
  ChanCodecParams p;
  p.config = config;
  p.enc1 = {Matrix::Zero(config.d, config.hidden), Vector::Zero(config.hidden)};
  p.enc2 = {Matrix::Zero(config.hidden, config.k), Vector::Zero(config.k)};
  p.dec1 = {Matrix::Zero(config.k, config.hidden), Vector::Zero(config.hidden)};
  p.dec2 = {Matrix::Zero(config.hidden, config.d), Vector::Zero(config.d)};
  return p;
}

CVector pack_complex(const Vector& reals) {
  if (reals.size() % 2 != 0)
    throw InvalidArgument("pack_complex: odd number of reals");
  CVector out(reals.size() / 2);
  for (Index j = 0; j < out.size(); ++j)
    out[j] = Complex(reals[2 * j], reals[2 * j + 1]);
  return out;
}

Vector unpack_complex(const CVector& symbols) {
  Vector out(2 * symbols.size());
  for (Index j = 0; j < symbols.size(); ++j) {
    out[2 * j] = symbols[j].real();
    out[2 * j + 1] = symbols[j].imag();
  }
  return out;
}

ChannelSymbols power_normalize(const CVector& symbols) {
  if (symbols.size() == 0) throw InvalidArgument("power_normalize: empty");
  const double power = symbols.squaredNorm() / static_cast<double>(symbols.size());
  if (power == 0.0) return {symbols, true};
  return {symbols / std::sqrt(power), false};
}

ChannelSymbols channel_encode(const Matrix& features,
                              const ChanCodecParams& params,
                              ChanEncodeCache& cache) {
  const ChanCodecConfig& c = params.config;
  if (features.cols() != c.d)
    throw InvalidArgument("channel_encode: feature width mismatch");
  if (features.rows() == 0)
    throw InvalidArgument("channel_encode: empty features");
  cache.in = features;
  cache.h_pre = affine(features, params.enc1.w, params.enc1.b);
  cache.h = gelu(cache.h_pre);
  cache.code = affine(cache.h, params.enc2.w, params.enc2.b);
  Vector flat(cache.code.size());
  for (Index t = 0; t < cache.code.rows(); ++t)
    for (Index j = 0; j < c.k; ++j) flat[t * c.k + j] = cache.code(t, j);
  cache.real_flat = flat;
  const Index m = flat.size() / 2;
  cache.power = flat.squaredNorm() / static_cast<double>(m);
  cache.degenerate = cache.power == 0.0;
  cache.normalized =
      cache.degenerate ? flat : Vector(flat / std::sqrt(cache.power));
  return {pack_complex(cache.normalized), cache.degenerate};
}

ChannelSymbols channel_encode(const Matrix& features,
                              const ChanCodecParams& params) {
  ChanEncodeCache cache;
  return channel_encode(features, params, cache);
}

void channel_encode_backward(const ChanEncodeCache& cache,
                             const ChanCodecParams& params,
                             const CVector& d_symbols, Matrix& d_features,
                             ChanCodecParams& grads) {
  const ChanCodecConfig& c = params.config;
  Vector g = unpack_complex(d_symbols);
  if (g.size() != cache.real_flat.size())
    throw InvalidArgument("channel_encode_backward: gradient length mismatch");
  Vector d_flat;
  if (cache.degenerate) {
    d_flat = g;
  } else {
    // y = v / sqrt(P), P = |v|^2 / m: the scale couples every component
    const Index m = cache.real_flat.size() / 2;
    const double inv_scale = 1.0 / std::sqrt(cache.power);
    const double coupling =
        g.dot(cache.normalized) / static_cast<double>(m);
    d_flat = inv_scale * (g - coupling * cache.normalized);
  }
  Matrix d_code(cache.code.rows(), c.k);
  for (Index t = 0; t < d_code.rows(); ++t)
    for (Index j = 0; j < c.k; ++j) d_code(t, j) = d_flat[t * c.k + j];
  Matrix d_h;
  affine_backward(cache.h, params.enc2.w, d_code, d_h, grads.enc2.w,
                  grads.enc2.b);
  Matrix d_h_pre = (d_h.array() * gelu_grad(cache.h_pre).array()).matrix();
  affine_backward(cache.in, params.enc1.w, d_h_pre, d_features, grads.enc1.w,
                  grads.enc1.b);
}

Matrix channel_decode(const CVector& symbols, const ChanCodecParams& params,
                      ChanDecodeCache& cache) {
  const ChanCodecConfig& c = params.config;
  if (symbols.size() == 0) throw InvalidArgument("channel_decode: empty symbols");
  if ((2 * symbols.size()) % c.k != 0)
    throw InvalidArgument("channel_decode: symbol count not a whole number of positions");
  const Index rows = 2 * symbols.size() / c.k;
  Vector flat = unpack_complex(symbols);
  cache.code.resize(rows, c.k);
  for (Index t = 0; t < rows; ++t)
    for (Index j = 0; j < c.k; ++j) cache.code(t, j) = flat[t * c.k + j];
  cache.h_pre = affine(cache.code, params.dec1.w, params.dec1.b);
  cache.h = gelu(cache.h_pre);
  return affine(cache.h, params.dec2.w, params.dec2.b);
}

Matrix channel_decode(const CVector& symbols, const ChanCodecParams& params) {
  ChanDecodeCache cache;
  return channel_decode(symbols, params, cache);
}

void channel_decode_backward(const ChanDecodeCache& cache,
                             const ChanCodecParams& params,
                             const Matrix& d_features, CVector& d_symbols,
                             ChanCodecParams& grads) {
  const ChanCodecConfig& c = params.config;
  Matrix d_h;
  affine_backward(cache.h, params.dec2.w, d_features, d_h, grads.dec2.w,
                  grads.dec2.b);
  Matrix d_h_pre = (d_h.array() * gelu_grad(cache.h_pre).array()).matrix();
  Matrix d_code;
  affine_backward(cache.code, params.dec1.w, d_h_pre, d_code, grads.dec1.w,
                  grads.dec1.b);
  Vector d_flat(d_code.size());
  for (Index t = 0; t < d_code.rows(); ++t)
    for (Index j = 0; j < c.k; ++j) d_flat[t * c.k + j] = d_code(t, j);
  d_symbols = pack_complex(d_flat);
}

namespace {

struct MiCore {
  double value = 0.0;
  Matrix d_u, d_y;
};

// InfoNCE over cyclic in-batch negatives with a cosine critic.
MiCore mi_core(const Matrix& u, const Matrix& y, int negatives, double tau,
               bool want_grads) {
  const Index n = u.rows();
  if (n < 2) throw InvalidArgument("mi_lower_bound: need at least 2 samples");
  if (y.rows() != n)
    throw InvalidArgument("mi_lower_bound: sample count mismatch");
  if (negatives < 1 || negatives >= n)
    throw InvalidArgument("mi_lower_bound: negatives_per_pair must be in [1, n-1]");
  if (tau <= 0.0) throw InvalidArgument("mi_lower_bound: tau must be positive");
  const double kNormFloor = 1e-12;
  Vector nu(n), ny(n);
  for (Index i = 0; i < n; ++i) {
    nu[i] = std::max(u.row(i).norm(), kNormFloor);
    ny[i] = std::max(y.row(i).norm(), kNormFloor);
  }
  MiCore out;
  if (want_grads) {
    out.d_u = Matrix::Zero(n, u.cols());
    out.d_y = Matrix::Zero(n, y.cols());
  }
  double total = 0.0;
  Vector f(negatives + 1);
  for (Index i = 0; i < n; ++i) {
    for (int c = 0; c <= negatives; ++c) {
      const Index j = (i + c) % n;
      f[c] = u.row(i).dot(y.row(j)) / (nu[i] * ny[j] * tau);
    }
    const double mx = f.maxCoeff();
    const double lse = mx + std::log((f.array() - mx).exp().sum());
    total += f[0] - lse;
    if (!want_grads) continue;
    for (int c = 0; c <= negatives; ++c) {
      const Index j = (i + c) % n;
      const double p = std::exp(f[c] - lse);
      const double w = ((c == 0 ? 1.0 : 0.0) - p) / (static_cast<double>(n) * tau);
      const double cos_ij = f[c] * tau;
      RowVector du = y.row(j) / (nu[i] * ny[j]);
      if (u.row(i).norm() > kNormFloor)
        du -= cos_ij / (nu[i] * nu[i]) * u.row(i);
      RowVector dy = u.row(i) / (nu[i] * ny[j]);
      if (y.row(j).norm() > kNormFloor)
        dy -= cos_ij / (ny[j] * ny[j]) * y.row(j);
      out.d_u.row(i) += w * du;
      out.d_y.row(j) += w * dy;
    }
  }
  out.value = total / static_cast<double>(n) +
              std::log(static_cast<double>(negatives) + 1.0);
  return out;
}

}  // namespace

double mi_lower_bound(const Matrix& x_samples, const Matrix& y_samples,
                      int negatives_per_pair, double tau) {
  if (x_samples.cols() != y_samples.cols())
    throw InvalidArgument("mi_lower_bound: sample width mismatch");
  return mi_core(x_samples, y_samples, negatives_per_pair, tau, false).value;
}

MiEstimate mi_lower_bound_grad(const Matrix& x_samples, const Matrix& y_samples,
                               const Matrix& wc, int negatives_per_pair,
                               double tau) {
  if (wc.rows() != x_samples.cols() || wc.cols() != y_samples.cols())
    throw InvalidArgument("mi_lower_bound: projection shape mismatch");
  Matrix u = x_samples * wc;
  MiCore core = mi_core(u, y_samples, negatives_per_pair, tau, true);
  MiEstimate est;
  est.value = core.value;
  est.d_x = core.d_u * wc.transpose();
  est.d_wc = x_samples.transpose() * core.d_u;
  est.d_y = std::move(core.d_y);
  return est;
}

double pretrain_autoencoder(ChanCodecParams& params,
                            const std::vector<Matrix>& features, int epochs,
                            double lr) {
  if (features.empty())
    throw InvalidArgument("pretrain_autoencoder: no training features");
  long long total = 0;
  for (const auto& x : features) {
    if (x.cols() != params.config.d || x.rows() == 0)
      throw InvalidArgument("pretrain_autoencoder: bad feature matrix");
    total += x.size();
  }
  AdamConfig ac;
  ac.lr = lr;
  Adam opt(ac);
  for (int e = 0; e < epochs; ++e) {
    auto grads = ChanCodecParams::zeros(params.config);
    for (const auto& x : features) {
      ChanEncodeCache ec;
      ChanDecodeCache dc;
      ChannelSymbols cs = channel_encode(x, params, ec);
      Matrix recon = channel_decode(cs.symbols, params, dc);
      Matrix d_recon = (2.0 / static_cast<double>(total)) * (recon - x);
      CVector d_sym;
      channel_decode_backward(dc, params, d_recon, d_sym, grads);
      Matrix d_feat;
      channel_encode_backward(ec, params, d_sym, d_feat, grads);
    }
    adam_step(opt, params, grads);
  }
  double se = 0.0;
  for (const auto& x : features) {
    Matrix recon = channel_decode(channel_encode(x, params).symbols, params);
    se += (recon - x).squaredNorm();
  }
  return se / static_cast<double>(total);
}

}  // namespace semcom
