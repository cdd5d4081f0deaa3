#include "geoml/random.hpp"

#include <cmath>
#include <numbers>

namespace geoml {

namespace {

// splitmix64 finalizer; decorrelates (seed, index) pairs.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(mix(mix(seed) ^ mix(index + 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return lo + static_cast<std::int64_t>(bits());
  // rejection sampling for an unbiased draw
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = bits();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Vector Rng::normal_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

Vector Rng::dirichlet(Eigen::Index n, double concentration) {
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = gamma(concentration);
  const double s = w.sum();
  if (s > 0.0) return w / s;
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

SpdMatrix random_spd(Eigen::Index dim, Rng& rng) {
  const Matrix g = rng.normal_matrix(dim, dim + 2);
  const double scale = std::exp(rng.uniform(-1.0, 1.0));
  Matrix p = g * g.transpose() / static_cast<double>(dim + 2);
  p += 0.05 * Matrix::Identity(dim, dim);
  return SpdMatrix(SymMatrix::symmetrized(scale * p));
}

SymMatrix random_sym(Eigen::Index dim, Rng& rng) {
  const Matrix g = rng.normal_matrix(dim, dim);
  return SymMatrix::symmetrized((g + g.transpose()) / std::sqrt(2.0));
}

Matrix random_orthogonal(Eigen::Index dim, Rng& rng) {
  const Matrix g = rng.normal_matrix(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

Matrix random_invertible(Eigen::Index dim, Rng& rng) {
  // Q1 diag(s) Q2 with singular values in [0.3, 3]
  const Matrix q1 = random_orthogonal(dim, rng);
  const Matrix q2 = random_orthogonal(dim, rng);
  Vector s(dim);
  for (Eigen::Index i = 0; i < dim; ++i) s(i) = std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
  return q1 * s.asDiagonal() * q2;
}

}  // namespace geoml
