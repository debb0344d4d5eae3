#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "semcom/chancodec.hpp"
#include "semcom/rng.hpp"
#include "semcom/semcodec.hpp"
#include "semcom/text.hpp"

using namespace semcom;

namespace {

ChanCodecConfig tiny_config() {
  ChanCodecConfig c;
  c.d = 6;
  c.hidden = 4;
  c.k = 2;
  return c;
}

Matrix random_features(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m(i) = rng.next_gaussian();
  return m;
}

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-4});
}

}  // namespace

TEST_CASE("complex packing is a bijection") {
  Vector v(4);
  v << 3, 4, -1, 0.5;
  CVector packed = pack_complex(v);
  REQUIRE(packed.size() == 2);
  CHECK(packed[0] == Complex(3, 4));
  CHECK(packed[1] == Complex(-1, 0.5));
  Vector round = unpack_complex(packed);
  CHECK((round.array() == v.array()).all());
  CHECK_THROWS_AS(pack_complex(Vector::Ones(3)), InvalidArgument);

  Rng rng(derive_seed(9, "chancodec-test", 0));
  for (int t = 0; t < 50; ++t) {
    Vector r(8);
    for (Index i = 0; i < 8; ++i) r[i] = rng.next_gaussian();
    CHECK((unpack_complex(pack_complex(r)).array() == r.array()).all());
  }
}

TEST_CASE("power normalization") {
  CVector v(2);
  v << Complex(2, 0), Complex(0, 0);
  auto out = power_normalize(v);
  CHECK_FALSE(out.degenerate);
  CHECK(out.symbols[0].real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(out.symbols[1]) == 0.0);

  // unit mean power afterwards, idempotent, scale invariant
  Rng rng(derive_seed(9, "chancodec-test", 1));
  CVector w(6);
  for (Index i = 0; i < 6; ++i) w[i] = rng.next_cgaussian(3.0);
  auto n1 = power_normalize(w);
  CHECK(n1.symbols.squaredNorm() / 6.0 == doctest::Approx(1.0).epsilon(1e-9));
  auto n2 = power_normalize(n1.symbols);
  CHECK((n2.symbols - n1.symbols).norm() < 1e-12);
  auto n3 = power_normalize(CVector(4.25 * w));
  CHECK((n3.symbols - n1.symbols).norm() < 1e-12);

  CVector zeros = CVector::Zero(3);
  auto degen = power_normalize(zeros);
  CHECK(degen.degenerate);
  CHECK(degen.symbols.norm() == 0.0);
  CHECK_THROWS_AS(power_normalize(CVector()), InvalidArgument);
}

TEST_CASE("channel encode shape and unit power") {
  Rng rng(derive_seed(9, "chancodec-test", 2));
  ChanCodecConfig config;  // 48 -> 32 -> 16
  auto params = ChanCodecParams::init(config, rng);
  Matrix features = random_features(4, 48, rng);
  ChannelSymbols cs = channel_encode(features, params);
  CHECK(cs.symbols.size() == 32);
  CHECK_FALSE(cs.degenerate);
  CHECK(cs.symbols.squaredNorm() / 32.0 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(channel_encode(random_features(2, 47, rng), params),
                  InvalidArgument);
  CHECK_THROWS_AS(channel_encode(Matrix(0, 48), params), InvalidArgument);

  Matrix recon = channel_decode(cs.symbols, params);
  CHECK(recon.rows() == 4);
  CHECK(recon.cols() == 48);
  CHECK_THROWS_AS(channel_decode(cs.symbols.head(31), params), InvalidArgument);
  CHECK_THROWS_AS(channel_decode(CVector(), params), InvalidArgument);
}

TEST_CASE("all-zero code passes through with degenerate flag") {
  auto params = ChanCodecParams::zeros(tiny_config());
  Matrix features = Matrix::Ones(2, 6);
  ChanEncodeCache cache;
  ChannelSymbols cs = channel_encode(features, params, cache);
  CHECK(cs.degenerate);
  CHECK(cs.symbols.norm() == 0.0);
  ChanCodecParams grads = ChanCodecParams::zeros(tiny_config());
  Matrix d_features;
  CVector d_sym = CVector::Ones(cs.symbols.size());
  channel_encode_backward(cache, params, d_sym, d_features, grads);
  CHECK(d_features.allFinite());
}

TEST_CASE("encode backward matches finite differences") {
  Rng rng(derive_seed(9, "chancodec-grad", 0));
  auto config = tiny_config();
  auto params = ChanCodecParams::init(config, rng);
  Matrix features = random_features(3, 6, rng);
  CVector weight(3);  // loss = sum_j re(w_j)*re(y_j) + im(w_j)*im(y_j)
  for (Index j = 0; j < 3; ++j)
    weight[j] = Complex(rng.next_gaussian(), rng.next_gaussian());

  auto loss_fn = [&](const Matrix& f, const ChanCodecParams& p) {
    CVector y = channel_encode(f, p).symbols;
    double L = 0.0;
    for (Index j = 0; j < y.size(); ++j)
      L += weight[j].real() * y[j].real() + weight[j].imag() * y[j].imag();
    return L;
  };

  ChanEncodeCache cache;
  channel_encode(features, params, cache);
  auto grads = ChanCodecParams::zeros(config);
  Matrix d_features;
  channel_encode_backward(cache, params, weight, d_features, grads);

  const double h = 1e-6;
  double worst = 0.0;
  for (Index i = 0; i < features.size(); ++i) {
    Matrix fp = features, fm = features;
    fp(i) += h;
    fm(i) -= h;
    const double numeric = (loss_fn(fp, params) - loss_fn(fm, params)) / (2 * h);
    worst = std::max(worst, relative_error(d_features(i), numeric));
  }
  struct Slot {
    double* w;
    const double* g;
    Index n;
  };
  std::vector<Slot> slots;
  {
    std::vector<std::pair<double*, Index>> ps;
    params.for_each_tensor([&](const std::string&, double* d, Index r, Index c) {
      ps.push_back({d, r * c});
    });
    std::size_t idx = 0;
    grads.for_each_tensor([&](const std::string&, double* d, Index r, Index c) {
      slots.push_back({ps[idx].first, d, r * c});
      ++idx;
    });
  }
  for (auto& s : slots)
    for (Index i = 0; i < s.n; ++i) {
      const double saved = s.w[i];
      s.w[i] = saved + h;
      const double up = loss_fn(features, params);
      s.w[i] = saved - h;
      const double down = loss_fn(features, params);
      s.w[i] = saved;
      worst = std::max(worst, relative_error(s.g[i], (up - down) / (2 * h)));
    }
  CHECK(worst < 1e-4);
}

TEST_CASE("decode backward matches finite differences") {
  Rng rng(derive_seed(9, "chancodec-grad", 1));
  auto config = tiny_config();
  auto params = ChanCodecParams::init(config, rng);
  CVector symbols(3);
  for (Index j = 0; j < 3; ++j)
    symbols[j] = Complex(rng.next_gaussian(), rng.next_gaussian());
  Matrix weight = random_features(3, 6, rng);

  auto loss_fn = [&](const CVector& s, const ChanCodecParams& p) {
    return (channel_decode(s, p).array() * weight.array()).sum();
  };

  ChanDecodeCache cache;
  channel_decode(symbols, params, cache);
  auto grads = ChanCodecParams::zeros(config);
  CVector d_symbols;
  channel_decode_backward(cache, params, weight, d_symbols, grads);

  const double h = 1e-6;
  double worst = 0.0;
  for (Index j = 0; j < symbols.size(); ++j) {
    CVector sp = symbols, sm = symbols;
    sp[j] += Complex(h, 0);
    sm[j] -= Complex(h, 0);
    worst = std::max(
        worst, relative_error(d_symbols[j].real(),
                              (loss_fn(sp, params) - loss_fn(sm, params)) /
                                  (2 * h)));
    sp = symbols;
    sm = symbols;
    sp[j] += Complex(0, h);
    sm[j] -= Complex(0, h);
    worst = std::max(
        worst, relative_error(d_symbols[j].imag(),
                              (loss_fn(sp, params) - loss_fn(sm, params)) /
                                  (2 * h)));
  }
  std::vector<std::pair<double*, Index>> ps;
  params.for_each_tensor([&](const std::string&, double* d, Index r, Index c) {
    ps.push_back({d, r * c});
  });
  std::vector<std::pair<const double*, Index>> gs;
  grads.for_each_tensor([&](const std::string&, const double* d, Index r,
                            Index c) { gs.push_back({d, r * c}); });
  for (std::size_t s = 0; s < ps.size(); ++s)
    for (Index i = 0; i < ps[s].second; ++i) {
      double* w = ps[s].first + i;
      const double saved = *w;
      *w = saved + h;
      const double up = loss_fn(symbols, params);
      *w = saved - h;
      const double down = loss_fn(symbols, params);
      *w = saved;
      worst = std::max(worst, relative_error(gs[s].first[i],
                                             (up - down) / (2 * h)));
    }
  CHECK(worst < 1e-4);
}

TEST_CASE("autoencoder reconstructs its training set") {
  // features produced by a randomly initialized semantic encoder
  Rng rng(derive_seed(9, "chancodec-pretrain", 0));
  SemCodecConfig sc;
  sc.vocab = 40;
  auto sem = SemCodecParams::init(sc, rng);
  std::vector<Matrix> features;
  for (const auto& tokens :
       std::vector<std::vector<int>>{{kBosId, 4, 5, 6, kEosId},
                                     {kBosId, 7, 8, kEosId},
                                     {kBosId, 9, 10, 11, 12, kEosId},
                                     {kBosId, 13, kEosId},
                                     {kBosId, 14, 15, kEosId},
                                     {kBosId, 16, 17, 18, kEosId}})
    features.push_back(semantic_encode(tokens, sem));

  Rng crng(derive_seed(9, "chancodec-pretrain", 1));
  auto params = ChanCodecParams::init(ChanCodecConfig{}, crng);
  double mse = pretrain_autoencoder(params, features, 2500, 3e-3);
  CHECK(mse < 1e-3);
}

TEST_CASE("mi lower bound stays under its ceiling") {
  Rng rng(derive_seed(9, "chancodec-mi", 0));
  for (int t = 0; t < 20; ++t) {
    const Index n = 4 + static_cast<Index>(rng.next_u64() % 12);
    const int k = 1 + static_cast<int>(rng.next_u64() % (n - 1));
    Matrix x = random_features(n, 6, rng), y = random_features(n, 6, rng);
    const double v = mi_lower_bound(x, y, k);
    CHECK(v <= std::log(static_cast<double>(k) + 1.0) + 1e-12);
  }
}

TEST_CASE("mi lower bound near zero for independent samples") {
  Rng rng(derive_seed(9, "chancodec-mi", 1));
  Matrix x = random_features(10000, 16, rng);
  Matrix y = random_features(10000, 16, rng);
  CHECK(mi_lower_bound(x, y, 15) <= 0.05);
}

TEST_CASE("mi lower bound saturates for identical samples") {
  Rng rng(derive_seed(9, "chancodec-mi", 2));
  Matrix x = random_features(2000, 16, rng);
  const double v = mi_lower_bound(x, x, 15);
  CHECK(v >= 0.9 * std::log(16.0));
  CHECK(v <= std::log(16.0) + 1e-12);
}

TEST_CASE("mi lower bound input validation") {
  Rng rng(derive_seed(9, "chancodec-mi", 3));
  Matrix x = random_features(8, 4, rng), y = random_features(8, 4, rng);
  CHECK_THROWS_AS(mi_lower_bound(x.topRows(1), y.topRows(1), 1),
                  InvalidArgument);
  CHECK_THROWS_AS(mi_lower_bound(x, y.topRows(4), 2), InvalidArgument);
  CHECK_THROWS_AS(mi_lower_bound(x, y, 0), InvalidArgument);
  CHECK_THROWS_AS(mi_lower_bound(x, y, 8), InvalidArgument);
  CHECK_THROWS_AS(mi_lower_bound(x, random_features(8, 5, rng), 2),
                  InvalidArgument);
  CHECK_THROWS_AS(mi_lower_bound(x, y, 2, 0.0), InvalidArgument);
}

TEST_CASE("projected mi estimate matches identity projection") {
  Rng rng(derive_seed(9, "chancodec-mi", 4));
  Matrix x = random_features(12, 4, rng), y = random_features(12, 4, rng);
  auto est = mi_lower_bound_grad(x, y, Matrix::Identity(4, 4), 3);
  CHECK(est.value == doctest::Approx(mi_lower_bound(x, y, 3)).epsilon(1e-12));
}

TEST_CASE("mi gradients match finite differences") {
  Rng rng(derive_seed(9, "chancodec-mi", 5));
  Matrix x = random_features(6, 8, rng);
  Matrix y = random_features(6, 4, rng);
  Matrix wc = random_features(8, 4, rng);
  auto est = mi_lower_bound_grad(x, y, wc, 3);

  const double h = 1e-6;
  double worst = 0.0;
  auto check_block = [&](Matrix& m, const Matrix& analytic) {
    for (Index i = 0; i < m.size(); ++i) {
      const double saved = m(i);
      m(i) = saved + h;
      const double up = mi_lower_bound_grad(x, y, wc, 3).value;
      m(i) = saved - h;
      const double down = mi_lower_bound_grad(x, y, wc, 3).value;
      m(i) = saved;
      worst = std::max(worst, relative_error(analytic(i), (up - down) / (2 * h)));
    }
  };
  check_block(x, est.d_x);
  check_block(y, est.d_y);
  check_block(wc, est.d_wc);
  CHECK(worst < 1e-4);
}
