#include "geoml/spd_geometry.hpp"

#include <cmath>
#include <string>

namespace geoml::spd {

namespace {


Matrix congruence(const Matrix& c, const Matrix& x) { return c * x * c.transpose(); }

}  // namespace

Metric parse_metric(std::string_view name) {
  if (name == "ai") return Metric::AffineInvariant;
  if (name == "bw") return Metric::BuresWasserstein;
  if (name == "loge") return Metric::LogEuclidean;
  throw ValidationError("unknown metric '" + std::string(name) + "' (expected ai|bw|loge)");
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::AffineInvariant:
      return "ai";
    case Metric::BuresWasserstein:
      return "bw";
    case Metric::LogEuclidean:
      return "loge";
  }
  return "?";
}

TangentVector::TangentVector(SpdMatrix p, SymMatrix u) : at(std::move(p)), direction(std::move(u)) {
  require_same_dim(at.dim(), direction.dim(), "tangent vector");
}

GeodesicQuery::GeodesicQuery(SpdMatrix a_, SpdMatrix b_, double t_)
    : a(std::move(a_)), b(std::move(b_)), t(t_) {
  require_same_dim(a.dim(), b.dim(), "geodesic");
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("geodesic parameter t must lie in [0, 1]");
}

double ai_distance(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "ai_distance");
  const Matrix ais = inv_sqrtm_spd(a).matrix();
  const auto inner = SymMatrix::symmetrized(congruence(ais, b.matrix()));
  const auto ev = sym_eig(inner).eigenvalues;
  return std::sqrt(ev.array().log().square().sum());
}

SpdMatrix ai_geodesic(const GeodesicQuery& q) {
  const Matrix as = sqrtm_spd(q.a).matrix();
  const Matrix ais = inv_sqrtm_spd(q.a).matrix();
  const auto inner = SymMatrix::symmetrized(congruence(ais, q.b.matrix()));
  const double t = q.t;
  const Matrix mid = sym_eig(inner).apply([t](double l) { return std::pow(l, t); });
  return SpdMatrix(SymMatrix::symmetrized(congruence(as, mid)));
}

double ai_metric(const SpdMatrix& p, const SymMatrix& u, const SymMatrix& v) {
  require_same_dim(p.dim(), u.dim(), "ai_metric");
  require_same_dim(p.dim(), v.dim(), "ai_metric");
  const Matrix pinv = inverse_spd(p).matrix();
  return (pinv * u.matrix() * pinv * v.matrix()).trace();
}

double bw_distance(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "bw_distance");
  // Equal to sqrt(tr A + tr B - 2 tr (A^{1/2} B A^{1/2})^{1/2}), evaluated as the
  // Procrustes residual min_U ||A^{1/2} - B^{1/2} U||_F to avoid cancellation.
  const Matrix as = sqrtm_spd(a).matrix();
  const Matrix bs = sqrtm_spd(b).matrix();
  const Eigen::JacobiSVD<Matrix> svd(bs * as, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix u = svd.matrixU() * svd.matrixV().transpose();
  return (as - bs * u).norm();
}

SpdMatrix bw_geodesic(const GeodesicQuery& q) {
  const Matrix as = sqrtm_spd(q.a).matrix();
  const Matrix ais = inv_sqrtm_spd(q.a).matrix();
  const auto inner = SymMatrix::symmetrized(congruence(as, q.b.matrix()));
  const Matrix root = sym_eig(inner).apply([](double l) { return std::sqrt(std::max(l, 0.0)); });
  const Matrix ab = as * root * ais;  // (AB)^{1/2}
  const double t = q.t;
  const Matrix g = (1 - t) * (1 - t) * q.a.matrix() + t * t * q.b.matrix() +
                   t * (1 - t) * (ab + ab.transpose());  // (BA)^{1/2} = ((AB)^{1/2})^T
  return SpdMatrix(SymMatrix::symmetrized(g));
}

double bw_metric(const SpdMatrix& p, const SymMatrix& u, const SymMatrix& v) {
  require_same_dim(p.dim(), u.dim(), "bw_metric");
  require_same_dim(p.dim(), v.dim(), "bw_metric");
  const Matrix lu = solve_lyapunov(p, u).matrix();
  const Matrix lv = solve_lyapunov(p, v).matrix();
  return (lu * p.matrix() * lv).trace();
}

double loge_distance(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "loge_distance");
  return (logm_spd(a).matrix() - logm_spd(b).matrix()).norm();
}

SpdMatrix loge_geodesic(const GeodesicQuery& q) {
  const double t = q.t;
  return expm_sym(logm_spd(q.a) * (1 - t) + logm_spd(q.b) * t);
}

SpdMatrix loge_mult(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "loge_mult");
  return expm_sym(logm_spd(a) + logm_spd(b));
}

SpdMatrix loge_scale(double lambda, const SpdMatrix& a) { return expm_sym(logm_spd(a) * lambda); }

double loge_inner(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "loge_inner");
  return frobenius_inner(logm_spd(a), logm_spd(b));
}

double loge_norm(const SpdMatrix& a) { return frobenius_norm(logm_spd(a)); }

SymMatrix dlog(const SpdMatrix& p, const SymMatrix& u) {
  require_same_dim(p.dim(), u.dim(), "dlog");
  const auto dec = sym_eig(p.sym());
  const Vector& l = dec.eigenvalues;
  const Matrix& q = dec.eigenvectors;
  Matrix ut = q.transpose() * u.matrix() * q;
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    for (Eigen::Index j = 0; j < l.size(); ++j) {
      double dd;
      const double diff = l(i) - l(j);
      if (std::abs(diff) <= 1e-12 * std::max(l(i), l(j))) {
        dd = 2.0 / (l(i) + l(j));  // limit 1/lambda, symmetric in (i, j)
      } else {
        dd = (std::log(l(i)) - std::log(l(j))) / diff;
      }
      ut(i, j) *= dd;
    }
  }
  return SymMatrix::symmetrized(q * ut * q.transpose());
}

double loge_metric(const SpdMatrix& p, const SymMatrix& u, const SymMatrix& v) {
  return frobenius_inner(dlog(p, u), dlog(p, v));
}

double distance(Metric m, const SpdMatrix& a, const SpdMatrix& b) {
  switch (m) {
    case Metric::AffineInvariant:
      return ai_distance(a, b);
    case Metric::BuresWasserstein:
      return bw_distance(a, b);
    case Metric::LogEuclidean:
      return loge_distance(a, b);
  }
  throw ValidationError("unknown metric");
}

SpdMatrix geodesic(Metric m, const GeodesicQuery& q) {
  switch (m) {
    case Metric::AffineInvariant:
      return ai_geodesic(q);
    case Metric::BuresWasserstein:
      return bw_geodesic(q);
    case Metric::LogEuclidean:
      return loge_geodesic(q);
  }
  throw ValidationError("unknown metric");
}

double metric_tensor(Metric m, const SpdMatrix& p, const SymMatrix& u, const SymMatrix& v) {
  switch (m) {
    case Metric::AffineInvariant:
      return ai_metric(p, u, v);
    case Metric::BuresWasserstein:
      return bw_metric(p, u, v);
    case Metric::LogEuclidean:
      return loge_metric(p, u, v);
  }
  throw ValidationError("unknown metric");
}

}  // namespace geoml::spd
