#pragma once

// Riemannian structures on the SPD cone: affine-invariant, Bures-Wasserstein
// and Log-Euclidean. Distances, geodesics, metric tensors, and the
// Log-Euclidean vector-space operations.

#include <string_view>

#include "geoml/matfun.hpp"

namespace geoml::spd {

enum class Metric { AffineInvariant, BuresWasserstein, LogEuclidean };

Metric parse_metric(std::string_view name);  // "ai" | "bw" | "loge"
std::string_view metric_name(Metric m);

struct TangentVector {
  SpdMatrix at;
  SymMatrix direction;

  TangentVector(SpdMatrix p, SymMatrix u);
};

struct GeodesicQuery {
  SpdMatrix a;
  SpdMatrix b;
  double t;

  /// Throws ValidationError unless dims agree and 0 <= t <= 1.
  GeodesicQuery(SpdMatrix a, SpdMatrix b, double t);
};

// Affine-invariant: d(A,B) = ||log(A^{-1/2} B A^{-1/2})||_F.
double ai_distance(const SpdMatrix& a, const SpdMatrix& b);
SpdMatrix ai_geodesic(const GeodesicQuery& q);
/// trace(P^{-1} U P^{-1} V)
double ai_metric(const SpdMatrix& p, const SymMatrix& u, const SymMatrix& v);

// Bures-Wasserstein: d^2 = tr A + tr B - 2 tr (A^{1/2} B A^{1/2})^{1/2}.
double bw_distance(const SpdMatrix& a, const SpdMatrix& b);
/// (1-t)^2 A + t^2 B + t(1-t)[(AB)^{1/2} + (BA)^{1/2}], with
/// (AB)^{1/2} = A^{1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}.
SpdMatrix bw_geodesic(const GeodesicQuery& q);
/// trace(L_P(U) P L_P(V)) where L_P solves the Lyapunov equation X P + P X = U.
double bw_metric(const SpdMatrix& p, const SymMatrix& u, const SymMatrix& v);

// Log-Euclidean: the pullback of the Frobenius geometry under log.
double loge_distance(const SpdMatrix& a, const SpdMatrix& b);
SpdMatrix loge_geodesic(const GeodesicQuery& q);
/// A (.) B = exp(log A + log B)
SpdMatrix loge_mult(const SpdMatrix& a, const SpdMatrix& b);
/// lambda (*) A = exp(lambda log A) = A^lambda
SpdMatrix loge_scale(double lambda, const SpdMatrix& a);
/// <log A, log B>_F
double loge_inner(const SpdMatrix& a, const SpdMatrix& b);
double loge_norm(const SpdMatrix& a);
/// <D log(P)(U), D log(P)(V)>_F
double loge_metric(const SpdMatrix& p, const SymMatrix& u, const SymMatrix& v);
/// Frechet derivative of the principal log at P applied to U, via the Loewner
/// divided-difference matrix in the eigenbasis of P.
SymMatrix dlog(const SpdMatrix& p, const SymMatrix& u);

double distance(Metric m, const SpdMatrix& a, const SpdMatrix& b);
SpdMatrix geodesic(Metric m, const GeodesicQuery& q);
double metric_tensor(Metric m, const SpdMatrix& p, const SymMatrix& u, const SymMatrix& v);

}  // namespace geoml::spd
