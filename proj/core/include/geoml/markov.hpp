#pragma once

// Probabilistic morphisms between finite spaces. A Markov kernel X ~> Y is a
// row-stochastic |X| x |Y| matrix; measures are weight vectors. Product spaces
// X x Y are enumerated row-major (x outer, y inner) everywhere in this module.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "geoml/matfun.hpp"

namespace geoml::markov {

class FiniteSpace {
 public:
  explicit FiniteSpace(std::vector<std::string> labels);
  /// Labels "0", "1", ..., "n-1".
  static FiniteSpace indexed(std::size_t n);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::size_t index_of(const std::string& label) const;

  bool operator==(const FiniteSpace& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
};

/// X x Y with labels "(x;y)", x outer.
FiniteSpace product(const FiniteSpace& x, const FiniteSpace& y);

inline constexpr double kMassTol = 1e-12;

class SignedVector {
 public:
  SignedVector(FiniteSpace space, Vector weights);

  const FiniteSpace& space() const noexcept { return space_; }
  const Vector& weights() const noexcept { return weights_; }
  double total_mass() const { return weights_.sum(); }
  /// Total variation norm sum |w_i|.
  double tv_norm() const { return weights_.cwiseAbs().sum(); }

  SignedVector operator+(const SignedVector& o) const;
  SignedVector operator-(const SignedVector& o) const;
  SignedVector operator*(double s) const;

 private:
  FiniteSpace space_;
  Vector weights_;
};

class ProbVector {
 public:
  /// Checks nonnegativity and unit mass within kMassTol.
  ProbVector(FiniteSpace space, Vector weights);

  static ProbVector uniform(const FiniteSpace& space);

  const FiniteSpace& space() const noexcept { return space_; }
  const Vector& weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }
  SignedVector as_signed() const { return SignedVector(space_, weights_); }

 private:
  FiniteSpace space_;
  Vector weights_;
};

class MarkovKernel {
 public:
  /// Checks every row is a probability vector over `target`.
  MarkovKernel(FiniteSpace source, FiniteSpace target, Matrix rows);

  static MarkovKernel identity(const FiniteSpace& space);
  /// Kernel of a deterministic map: row x is the Dirac mass at image[x].
  static MarkovKernel deterministic(const FiniteSpace& source, const FiniteSpace& target,
                                    std::span<const std::size_t> image);

  const FiniteSpace& source() const noexcept { return source_; }
  const FiniteSpace& target() const noexcept { return target_; }
  const Matrix& rows() const noexcept { return rows_; }
  ProbVector row(std::size_t x) const;

 private:
  FiniteSpace source_;
  FiniteSpace target_;
  Matrix rows_;
};

class JointMeasure {
 public:
  /// Checks nonnegativity and unit total mass within kMassTol.
  JointMeasure(FiniteSpace xspace, FiniteSpace yspace, Matrix table);

  const FiniteSpace& xspace() const noexcept { return xspace_; }
  const FiniteSpace& yspace() const noexcept { return yspace_; }
  const Matrix& table() const noexcept { return table_; }
  /// Row-major flattening over product(xspace, yspace).
  ProbVector flattened() const;

 private:
  FiniteSpace xspace_;
  FiniteSpace yspace_;
  Matrix table_;
};

ProbVector dirac(const FiniteSpace& space, const std::string& label);
ProbVector dirac(const FiniteSpace& space, std::size_t index);

/// (T2 o T1)(x, z) = sum_y T1(x, y) T2(y, z).
MarkovKernel compose(const MarkovKernel& t1, const MarkovKernel& t2);

/// (T_* mu)(y) = sum_x T(x, y) mu(x); linear, maps probabilities to probabilities.
SignedVector pushforward(const MarkovKernel& t, const SignedVector& mu);
ProbVector pushforward(const MarkovKernel& t, const ProbVector& mu);

/// Row x of the join is T1(x, .) (x) T2(x, .).
MarkovKernel join(const MarkovKernel& t1, const MarkovKernel& t2);

/// Graph of T: x -> delta_x (x) T(x, .), i.e. join(identity, T).
MarkovKernel graph(const MarkovKernel& t);

/// Coordinate projection X x Y -> X as a deterministic kernel.
MarkovKernel projection_x(const FiniteSpace& x, const FiniteSpace& y);

/// (Gamma_T)_* mu_X as a table: mu_X(x) T(x, y).
JointMeasure graph_pushforward(const MarkovKernel& t, const ProbVector& mu_x);

ProbVector marginal_x(const JointMeasure& mu);
ProbVector marginal_y(const JointMeasure& mu);

JointMeasure product_measure(const ProbVector& mu_x, const ProbVector& nu_y);

struct Disintegration {
  ProbVector marginal;
  MarkovKernel kernel;
};

/// Regular conditional probability of Y given X. Rows over zero-marginal x
/// are filled with the uniform distribution.
Disintegration disintegrate(const JointMeasure& mu);

/// True iff ||graph_pushforward(T, marginal_x(mu)) - mu||_inf <= tol.
bool verify_conditional(const MarkovKernel& t, const JointMeasure& mu, double tol);

/// True iff rows of t1 and t2 agree within tol wherever mu_x > 0.
bool ae_equal(const MarkovKernel& t1, const MarkovKernel& t2, const ProbVector& mu_x, double tol);

/// Additive noise on a 1-D grid: weights[k] is the mass at index offset
/// min_offset + k.
struct OffsetNoise {
  int min_offset = 0;
  Vector weights;
};

/// Row x is the noise profile shifted to grid index f[x]; mass falling off the
/// grid accumulates at the nearest edge.
MarkovKernel noise_channel(const FiniteSpace& xspace, const FiniteSpace& ygrid,
                           std::span<const std::size_t> f, const OffsetNoise& noise);

/// r(x) = sum_y yvalues(y) mu_{Y|X}(y | x); zero-marginal x use the uniform row.
Vector regression_function(const JointMeasure& mu, const Vector& yvalues);

}  // namespace geoml::markov
