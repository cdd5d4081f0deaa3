#pragma once

// Heat-kernel graph Laplacian on point clouds, the point-cloud Laplace
// operator and its normalized pointwise estimator, plus samplers for a few
// manifolds with known Laplacian eigenfunctions. Sign convention throughout:
// the positive semidefinite Laplacian -div grad.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geoml/matfun.hpp"

namespace geoml::lap {

class PointCloud {
 public:
  /// Columns of `points` are the samples; manifold_dim is declared, not checked.
  PointCloud(Matrix points, int manifold_dim);

  const Matrix& points() const noexcept { return points_; }
  Eigen::Index ambient_dim() const noexcept { return points_.rows(); }
  Eigen::Index size() const noexcept { return points_.cols(); }
  int manifold_dim() const noexcept { return manifold_dim_; }

 private:
  Matrix points_;
  int manifold_dim_;
};

/// W_ij = exp(-||x_i - x_j||^2 / (4t))
struct HeatWeights {
  double t;
  Matrix matrix;
};

HeatWeights heat_weights(const PointCloud& cloud, double t);

/// (1/2) sum_ij W_ij (z_i - z_j)^2
double quadratic_form(const HeatWeights& w, const Vector& z);

/// (D - W) z, D = diag of row sums
Vector graph_laplacian_apply(const HeatWeights& w, const Vector& z);

using ScalarField = std::function<double(const Vector&)>;

/// f(x) (1/m) sum_j e^{-|x - x_j|^2/4t} - (1/m) sum_j f(x_j) e^{-|x - x_j|^2/4t}
double pointcloud_laplacian(const PointCloud& cloud, double t, const ScalarField& f, const Vector& x);

/// t_m = m^{-1/(n + 2 + alpha)}
double bn_scale(std::size_t m, int n, double alpha);

/// pointcloud_laplacian at t = bn_scale(m, n, alpha), times 1/(t (4 pi t)^{n/2}).
double bn_estimate(const PointCloud& cloud, const ScalarField& f, const Vector& p, double alpha = 1.0);

PointCloud sample_circle(std::size_t m, std::uint64_t seed);
PointCloud sample_sphere(std::size_t m, std::uint64_t seed);
/// S^1 x S^1 in R^4 (product of unit circles), flat metric.
PointCloud sample_flat_torus(std::size_t m, std::uint64_t seed);

enum class Manifold { Circle, Sphere, FlatTorus };
Manifold parse_manifold(const std::string& name);
std::string manifold_name(Manifold m);

struct Eigenfunction {
  ScalarField f;
  ScalarField laplacian_f;
  double eigenvalue;
  double volume;
  int manifold_dim;
};

/// Ids: circle {"const", "cos"}, sphere {"const", "z"}, torus {"const", "cos1"}.
Eigenfunction analytic_laplacian(Manifold manifold, const std::string& eigenfunction);

PointCloud sample(Manifold manifold, std::size_t m, std::uint64_t seed);

struct ConvergenceRow {
  std::size_t m;
  double median_relative_error;
};

/// For each size, median over `seeds` runs of |bn_estimate - target| / |target|
/// at p, with target = (Delta f)(p) / vol. Seed s of size m uses stream
/// (base_seed, s * sizes.size() + index of m).
std::vector<ConvergenceRow> convergence_sweep(Manifold manifold, const std::string& eigenfunction,
                                              const Vector& p, const std::vector<std::size_t>& sizes,
                                              std::size_t seeds, double alpha, std::uint64_t base_seed);

/// Base point used by the sweep: (1, 0, ...) on each manifold.
Vector default_base_point(Manifold manifold);

}  // namespace geoml::lap
