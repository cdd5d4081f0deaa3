#pragma once

// Bregman divergences and the Alpha Log-Det family.

#include <functional>

#include "geoml/matfun.hpp"

namespace geoml::div {

/// A differentiable, strictly convex function on a convex domain. Points are
/// matrices (vectors as n x 1); gradients pair with points through the
/// Frobenius inner product.
struct ConvexSpec {
  std::function<double(const Matrix&)> value;
  std::function<Matrix(const Matrix&)> gradient;
  std::function<bool(const Matrix&)> in_domain = [](const Matrix&) { return true; };
};

/// phi(x) = ||x||^2 on R^n; B_phi(x, y) = ||x - y||^2.
ConvexSpec squared_norm();
/// phi(x) = -sum log x_i on the positive orthant.
ConvexSpec neg_log();
/// phi(X) = -log det X on SPD matrices; gradient -X^{-1}.
ConvexSpec neg_logdet();

class AlphaParam {
 public:
  explicit AlphaParam(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// |alpha| at or beyond this switches to the exact limit formulas.
inline constexpr double kAlphaLimitSwitch = 1.0 - 1e-6;

/// B_phi(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>
double bregman(const ConvexSpec& phi, const Matrix& x, const Matrix& y);

/// 4/(1-a^2) [ (1-a)/2 phi(x) + (1+a)/2 phi(y) - phi((1-a)/2 x + (1+a)/2 y) ];
/// B_phi(x, y) at a = 1 and B_phi(y, x) at a = -1.
double alpha_divergence(const ConvexSpec& phi, AlphaParam alpha, const Matrix& x, const Matrix& y);

/// Alpha Log-Det divergence. Log-determinants are sums of log-eigenvalues.
double alpha_logdet(AlphaParam alpha, const SpdMatrix& a, const SpdMatrix& b);

/// |d^a(A, B) - d^{-a}(B, A)|
double check_dual_symmetry(AlphaParam alpha, const SpdMatrix& a, const SpdMatrix& b);

/// log det(w A + (1-w) B) - w log det A - (1-w) log det B, nonnegative for w in [0, 1].
double fan_gap(double w, const SpdMatrix& a, const SpdMatrix& b);

}  // namespace geoml::div
