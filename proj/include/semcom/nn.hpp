#pragma once

#include <cmath>

#include "semcom/types.hpp"

namespace semcom {

inline double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x * 0.7071067811865476));
}

inline double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * 0.7071067811865476));
  const double pdf = 0.3989422804014327 * std::exp(-0.5 * x * x);
  return cdf + x * pdf;
}

inline Matrix gelu(const Matrix& m) {
  return m.unaryExpr([](double v) { return gelu(v); });
}

inline Matrix gelu_grad(const Matrix& m) {
  return m.unaryExpr([](double v) { return gelu_grad(v); });
}

inline Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    Eigen::ArrayXd row = m.row(i).transpose().array();
    Eigen::ArrayXd e = (row - row.maxCoeff()).exp();
    out.row(i) = (e / e.sum()).matrix().transpose();
  }
  return out;
}

// y = x * w + b (b broadcast over rows)
inline Matrix affine(const Matrix& x, const Matrix& w, const Vector& b) {
  return (x * w).rowwise() + b.transpose();
}

inline void affine_backward(const Matrix& x, const Matrix& w,
                            const Matrix& d_out, Matrix& d_x, Matrix& g_w,
                            Vector& g_b) {
  d_x = d_out * w.transpose();
  g_w += x.transpose() * d_out;
  g_b += d_out.colwise().sum().transpose();
}

}  // namespace semcom
