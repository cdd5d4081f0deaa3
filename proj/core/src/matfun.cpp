#include "geoml/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace geoml {

namespace {

void check_finite(const Matrix& m) {
  if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
}

}  // namespace

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ValidationError(os.str());
  }
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw ValidationError("symmetric matrix must be square and non-empty");
  }
  check_finite(m_);
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m_.cols(); ++j) {
      const double tol = kSymmetryTol * std::max(1.0, std::abs(m_(i, j)));
      if (std::abs(m_(i, j) - m_(j, i)) > tol) {
        std::ostringstream os;
        os << "matrix is not symmetric at (" << i << "," << j << ")";
        throw ValidationError(os.str());
      }
    }
  }
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ValidationError("symmetric matrix must be square and non-empty");
  }
  return SymMatrix(Matrix(0.5 * (m + m.transpose())), Unchecked{});
}

SymMatrix SymMatrix::zero(Eigen::Index dim) {
  return SymMatrix(Matrix::Zero(dim, dim), Unchecked{});
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim), Unchecked{});
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal()), Unchecked{});
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  require_same_dim(dim(), o.dim(), "SymMatrix +");
  return SymMatrix(Matrix(m_ + o.m_), Unchecked{});
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  require_same_dim(dim(), o.dim(), "SymMatrix -");
  return SymMatrix(Matrix(m_ - o.m_), Unchecked{});
}

SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(Matrix(m_ * s), Unchecked{}); }

SpdMatrix::SpdMatrix(SymMatrix s) : base_(std::move(s)), min_eig_(0.0) {
  const auto dec = sym_eig(base_);
  const double lo = dec.eigenvalues(0);
  const double hi = dec.eigenvalues(dec.eigenvalues.size() - 1);
  if (!(lo > 0.0) || lo <= kSpdRelativeFloor * hi) {
    std::ostringstream os;
    os << "matrix is not (numerically) positive definite: eigenvalues in [" << lo << ", " << hi
       << "]";
    throw NumericalError(os.str());
  }
  min_eig_ = lo;
}

SpdMatrix SpdMatrix::identity(Eigen::Index dim) { return SpdMatrix(SymMatrix::identity(dim)); }

SpdMatrix SpdMatrix::diagonal(const Vector& d) { return SpdMatrix(SymMatrix::diagonal(d)); }

SpectralDecomposition sym_eig(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SpectralDecomposition sym_eig(const Matrix& a) { return sym_eig(SymMatrix(a)); }

SymMatrix logm_spd(const SpdMatrix& a) {
  return SymMatrix::symmetrized(sym_eig(a.sym()).apply([](double l) { return std::log(l); }));
}

SpdMatrix expm_sym(const SymMatrix& a) {
  return SpdMatrix(
      SymMatrix::symmetrized(sym_eig(a).apply([](double l) { return std::exp(l); })));
}

SpdMatrix sqrtm_spd(const SpdMatrix& a) {
  return SpdMatrix(
      SymMatrix::symmetrized(sym_eig(a.sym()).apply([](double l) { return std::sqrt(l); })));
}

SpdMatrix inv_sqrtm_spd(const SpdMatrix& a) {
  return SpdMatrix(SymMatrix::symmetrized(
      sym_eig(a.sym()).apply([](double l) { return 1.0 / std::sqrt(l); })));
}

SpdMatrix inverse_spd(const SpdMatrix& a) {
  return SpdMatrix(
      SymMatrix::symmetrized(sym_eig(a.sym()).apply([](double l) { return 1.0 / l; })));
}

SpdMatrix powm_spd(const SpdMatrix& a, double p) {
  return SpdMatrix(
      SymMatrix::symmetrized(sym_eig(a.sym()).apply([p](double l) { return std::pow(l, p); })));
}

double logdet_spd(const SpdMatrix& a) {
  return sym_eig(a.sym()).eigenvalues.array().log().sum();
}

SymMatrix solve_lyapunov(const SpdMatrix& p, const SymMatrix& v) {
  require_same_dim(p.dim(), v.dim(), "solve_lyapunov");
  const auto dec = sym_eig(p.sym());
  const Matrix& q = dec.eigenvectors;
  Matrix vt = q.transpose() * v.matrix() * q;
  const auto n = vt.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      vt(i, j) /= dec.eigenvalues(i) + dec.eigenvalues(j);
    }
  }
  return SymMatrix::symmetrized(q * vt * q.transpose());
}

double frobenius_inner(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "frobenius_inner");
  return (a.matrix().array() * b.matrix().array()).sum();
}

double frobenius_norm(const SymMatrix& a) { return a.matrix().norm(); }

bool approx_equal(const Matrix& a, const Matrix& b, double rel_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).norm() <= std::max(rel_tol * b.norm(), 1e-14);
}

}  // namespace geoml
