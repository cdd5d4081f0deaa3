#pragma once

// Kernel mean embeddings, MMD, the correct loss on finite spaces, RKHS
// covariance operators and their Log-Hilbert-Schmidt distance computed from
// Gram matrices.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "geoml/kernels.hpp"
#include "geoml/markov.hpp"

namespace geoml::rkhs {

/// Weighted empirical measure; points are the columns of `points`.
class Sample {
 public:
  /// Uniform weights 1/m.
  explicit Sample(Matrix points);
  Sample(Matrix points, Vector weights);

  const Matrix& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return points_.cols(); }
  Eigen::Index ambient_dim() const noexcept { return points_.rows(); }

 private:
  Matrix points_;
  Vector weights_;
};

/// ||M_K(S1) - M_K(S2)||_{H(K)} with the plug-in (V-statistic) embedding.
double mmd(const kern::KernelSpec& spec, const Sample& s1, const Sample& s2);

/// sqrt(w^T K w) for a signed measure with atoms at the columns of `points`.
double signed_embedding_norm(const kern::KernelSpec& spec, const Matrix& points, const Vector& w);

/// 2 sqrt(kbar / n) + sqrt(2 log(1/eps) / n). Valid when every unit-norm RKHS
/// function is bounded by 1 in sup norm (e.g. k(y, y) <= 1); the caller is
/// responsible for that premise.
double concentration_bound(std::size_t n, double eps, double kbar);

using PointSampler = std::function<Vector(Rng&)>;

struct ConcentrationReport {
  double failure_rate;
  double bound;
  double mean_mmd;
  double kbar;             // estimated from the reference sample
  std::size_t reference_size;
};

/// Fraction of `trials` n-samples whose MMD to the reference embedding exceeds
/// concentration_bound(n, eps, kbar). The true embedding is replaced by an
/// empirical proxy of size proxy_factor * n drawn once from the same sampler.
ConcentrationReport concentration_montecarlo(const kern::KernelSpec& spec, const PointSampler& mu,
                                             std::size_t n, double eps, std::size_t trials,
                                             std::uint64_t seed, std::size_t proxy_factor = 50);

/// Ambient coordinates for the points of X and Y; the pair (x, y) sits at
/// x_coords.col(x) + y_coords.col(y).
struct ProductEmbedding {
  Matrix x_coords;
  Matrix y_coords;

  /// Simplex vertices e_x and e_{|X|+y} in R^{|X|+|Y|}; injective on X x Y.
  static ProductEmbedding simplex(std::size_t nx, std::size_t ny);
  /// Columns (x, y) for the product grid, row-major (x outer).
  Matrix pair_points() const;
};

/// || M_K (Gamma_h)_* mu_X - M_K mu ||, evaluated as the embedding norm of the
/// signed difference table.
double correct_loss(const kern::KernelSpec& spec, const markov::MarkovKernel& h,
                    const markov::JointMeasure& mu, const ProductEmbedding& embed);

/// Data and regularization for C_{Phi(X1)} + g1 I and C_{Phi(X2)} + g2 I.
struct RegularizedCovariancePair {
  Matrix data1;  // d x m1, columns are observations
  Matrix data2;  // d x m2
  double gamma1;
  double gamma2;
  kern::KernelSpec spec;

  /// Validates gamma > 0, m >= 1, matching ambient dimension, vector-domain kernel.
  void validate() const;
};

struct CovBlocks {
  Matrix aa;  // J K[X1] J / (m1 g1)
  Matrix bb;  // J K[X2] J / (m2 g2)
  Matrix ab;  // J K[X1,X2] J / sqrt(m1 m2 g1 g2)
  Matrix ba;  // ab^T
};

/// J_m = I_m - (1/m) 1 1^T
Matrix centering(Eigen::Index m);

CovBlocks cov_gram_blocks(const RegularizedCovariancePair& pair);

/// h(l) = log(1 + l) / l, h(0) = 1
double log_ratio(double lambda);

/// Log-HS distance between the regularized covariance operators:
/// sqrt(||log(I + A*A)||_F^2 + ||log(I + B*B)||_F^2
///      - 2 tr[B*A h(A*A) A*B h(B*B)] + log(g2/g1)^2).
double loghs_cov_distance(const RegularizedCovariancePair& pair);

/// <log(C1 + g1 I), log(C2 + g2 I)> in the extended HS inner product:
/// tr[B*A h(A*A) A*B h(B*B)] + log g1 log g2.
double loghs_cov_inner(const RegularizedCovariancePair& pair);

/// Pairwise Log-HS distances between covariance operators of `datasets`
/// (each d x m_i), all regularized with the same gamma.
Matrix two_layer_distance_matrix(const std::vector<Matrix>& datasets, const kern::KernelSpec& k1,
                                 double gamma);

/// K2[i][j] = exp(-D[i][j]^2 / sigma2^2)
Matrix two_layer_kernel(const Matrix& distances, double sigma2);

/// Label of the nearest training item; ties go to the lowest index.
int classify_1nn(std::span<const double> distances, std::span<const int> labels);

}  // namespace geoml::rkhs
