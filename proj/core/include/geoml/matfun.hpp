#pragma once

// Spectral calculus for real symmetric matrices. Every matrix function in the
// library is evaluated through a single symmetric eigendecomposition.

#include <utility>

#include <Eigen/Dense>

#include "geoml/errors.hpp"

namespace geoml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Real symmetric matrix. Construction checks
/// |a_ij - a_ji| <= 1e-12 * max(1, |a_ij|).
class SymMatrix {
 public:
  explicit SymMatrix(Matrix m);

  /// (m + m^T) / 2 without a symmetry check; for results of arithmetic that is
  /// symmetric in exact arithmetic.
  static SymMatrix symmetrized(const Matrix& m);
  static SymMatrix zero(Eigen::Index dim);
  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(const Vector& d);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  struct Unchecked {};
  SymMatrix(Matrix m, Unchecked) : m_(std::move(m)) {}
  Matrix m_;
};

/// Symmetric positive-definite matrix. Rejects inputs whose smallest
/// eigenvalue is <= 1e-10 times the largest.
class SpdMatrix {
 public:
  explicit SpdMatrix(SymMatrix s);
  explicit SpdMatrix(Matrix m) : SpdMatrix(SymMatrix(std::move(m))) {}

  static SpdMatrix identity(Eigen::Index dim);
  static SpdMatrix diagonal(const Vector& d);

  const SymMatrix& sym() const noexcept { return base_; }
  const Matrix& matrix() const noexcept { return base_.matrix(); }
  Eigen::Index dim() const noexcept { return base_.dim(); }
  double min_eig() const noexcept { return min_eig_; }

 private:
  SymMatrix base_;
  double min_eig_;
};

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthogonal, columns paired with eigenvalues

  /// Q f(L) Q^T for a scalar function f applied to each eigenvalue.
  template <typename F>
  Matrix apply(F&& f) const {
    Vector fl = eigenvalues.unaryExpr(std::forward<F>(f));
    return eigenvectors * fl.asDiagonal() * eigenvectors.transpose();
  }
};

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kSpdRelativeFloor = 1e-10;

SpectralDecomposition sym_eig(const SymMatrix& a);
/// Validating overload: throws ValidationError for non-symmetric input.
SpectralDecomposition sym_eig(const Matrix& a);

SymMatrix logm_spd(const SpdMatrix& a);
SpdMatrix expm_sym(const SymMatrix& a);
SpdMatrix sqrtm_spd(const SpdMatrix& a);
SpdMatrix inv_sqrtm_spd(const SpdMatrix& a);
SpdMatrix inverse_spd(const SpdMatrix& a);
/// A^p for real p, spectrally.
SpdMatrix powm_spd(const SpdMatrix& a, double p);

/// Sum of log-eigenvalues; never forms the determinant.
double logdet_spd(const SpdMatrix& a);

/// Unique symmetric X with X P + P X = V.
SymMatrix solve_lyapunov(const SpdMatrix& p, const SymMatrix& v);

double frobenius_inner(const SymMatrix& a, const SymMatrix& b);
double frobenius_norm(const SymMatrix& a);

/// ||a - b||_F <= max(rel_tol * ||b||_F, 1e-14)
bool approx_equal(const Matrix& a, const Matrix& b, double rel_tol);

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);

}  // namespace geoml
