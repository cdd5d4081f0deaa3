#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "geoml/matfun.hpp"

namespace geoml {

/// Seeded generator with platform-independent output. The engine is the
/// standard-specified mt19937_64; uniform and normal variates are derived from
/// raw 64-bit draws here rather than through <random> distributions, whose
/// algorithms differ between standard libraries.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/v1";

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream for work unit `index`, stable under reordering.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t bits() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  /// Standard normal (Box-Muller, cached pair).
  double normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);

  Vector normal_vector(Eigen::Index n);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Uniform on the probability simplex (Dirichlet(1,...,1)) unless `concentration` is given.
  Vector dirichlet(Eigen::Index n, double concentration = 1.0);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Wishart-style SPD draw G G^T / dim + eps I with a random log-uniform scale;
/// condition numbers stay moderate.
SpdMatrix random_spd(Eigen::Index dim, Rng& rng);
/// Random symmetric matrix with standard normal entries (off-diagonal scaled 1/sqrt(2)).
SymMatrix random_sym(Eigen::Index dim, Rng& rng);
/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(Eigen::Index dim, Rng& rng);
/// Well-conditioned random invertible matrix.
Matrix random_invertible(Eigen::Index dim, Rng& rng);

}  // namespace geoml
