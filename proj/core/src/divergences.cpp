#include "geoml/divergences.hpp"

#include <cmath>
#include <string>

namespace geoml::div {

namespace {

void require_domain(const ConvexSpec& phi, const Matrix& x, const char* what) {
  if (!phi.in_domain(x)) throw ValidationError(std::string(what) + ": point outside the domain");
}

bool is_spd(const Matrix& x) {
  if (x.rows() != x.cols() || x.rows() == 0) return false;
  try {
    SpdMatrix{SymMatrix(x)};
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// d^1(A, B) = tr(B^{-1} A - I) - log det(B^{-1} A)
double logdet_limit(const SpdMatrix& a, const SpdMatrix& b) {
  const Eigen::LLT<Matrix> llt(b.matrix());
  const Matrix binv_a = llt.solve(a.matrix());
  const auto n = static_cast<double>(a.dim());
  return binv_a.trace() - n - (logdet_spd(a) - logdet_spd(b));
}

}  // namespace

ConvexSpec squared_norm() {
  return {[](const Matrix& x) { return x.squaredNorm(); },
          [](const Matrix& x) { return Matrix(2.0 * x); }};
}

ConvexSpec neg_log() {
  return {[](const Matrix& x) { return -x.array().log().sum(); },
          [](const Matrix& x) { return Matrix(-x.array().inverse()); },
          [](const Matrix& x) { return x.size() > 0 && (x.array() > 0.0).all(); }};
}

ConvexSpec neg_logdet() {
  return {[](const Matrix& x) { return -logdet_spd(SpdMatrix(SymMatrix::symmetrized(x))); },
          [](const Matrix& x) {
            return Matrix(-inverse_spd(SpdMatrix(SymMatrix::symmetrized(x))).matrix());
          },
          is_spd};
}

AlphaParam::AlphaParam(double alpha) : alpha_(alpha) {
  if (!(alpha >= -1.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [-1, 1]");
}

double bregman(const ConvexSpec& phi, const Matrix& x, const Matrix& y) {
  require_domain(phi, x, "bregman");
  require_domain(phi, y, "bregman");
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ValidationError("bregman: shape mismatch");
  }
  const Matrix g = phi.gradient(y);
  return phi.value(x) - phi.value(y) - (g.array() * (x - y).array()).sum();
}

double alpha_divergence(const ConvexSpec& phi, AlphaParam alpha, const Matrix& x, const Matrix& y) {
  const double a = alpha.value();
  if (a >= kAlphaLimitSwitch) return bregman(phi, x, y);
  if (a <= -kAlphaLimitSwitch) return bregman(phi, y, x);
  require_domain(phi, x, "alpha_divergence");
  require_domain(phi, y, "alpha_divergence");
  const double wx = 0.5 * (1.0 - a);
  const double wy = 0.5 * (1.0 + a);
  const Matrix mid = wx * x + wy * y;
  return 4.0 / (1.0 - a * a) * (wx * phi.value(x) + wy * phi.value(y) - phi.value(mid));
}

double alpha_logdet(AlphaParam alpha, const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "alpha_logdet");
  const double al = alpha.value();
  if (al >= kAlphaLimitSwitch) return logdet_limit(a, b);
  if (al <= -kAlphaLimitSwitch) return logdet_limit(b, a);
  const double wa = 0.5 * (1.0 - al);
  const double wb = 0.5 * (1.0 + al);
  const SpdMatrix mid(SymMatrix::symmetrized(wa * a.matrix() + wb * b.matrix()));
  const double gap = logdet_spd(mid) - wa * logdet_spd(a) - wb * logdet_spd(b);
  return 4.0 / (1.0 - al * al) * gap;
}

double check_dual_symmetry(AlphaParam alpha, const SpdMatrix& a, const SpdMatrix& b) {
  return std::abs(alpha_logdet(alpha, a, b) - alpha_logdet(AlphaParam(-alpha.value()), b, a));
}

double fan_gap(double w, const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "fan_gap");
  if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("fan_gap: weight must lie in [0, 1]");
  const SpdMatrix mix(SymMatrix::symmetrized(w * a.matrix() + (1.0 - w) * b.matrix()));
  return logdet_spd(mix) - w * logdet_spd(a) - (1.0 - w) * logdet_spd(b);
}

}  // namespace geoml::div
