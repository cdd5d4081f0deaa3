#pragma once

// Kernel constructors on vectors and SPD matrices, Gram matrices, and
// empirical positive / negative definiteness checks with witness search.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "geoml/matfun.hpp"
#include "geoml/random.hpp"
#include "geoml/spd_geometry.hpp"

namespace geoml::kern {

/// exp(-d(A,B)^p / sigma^2) for a Riemannian distance on SPD matrices.
struct GaussianMetric {
  spd::Metric metric;
  double sigma;
  double p = 2.0;
};
/// (<log A, log B>_F + c)^degree
struct LogEPoly {
  double c;
  int degree;
};
/// exp(-||log A - log B||_F^p / sigma^2)
struct LogEExp {
  double sigma;
  double p = 2.0;
};
/// exp(-(sigma/4) d^0_logdet(A,B)) = det(A)^{s/2} det(B)^{s/2} / det((A+B)/2)^s
struct Stein {
  double sigma;
};
/// exp(-||x - y||^2 / sigma^2) on vectors
struct EuclideanGaussian {
  double sigma;
};
/// <x, y> on vectors, <A, B>_F on matrices
struct Linear {};

using KernelParams = std::variant<GaussianMetric, LogEPoly, LogEExp, Stein, EuclideanGaussian, Linear>;

enum class PointKind { Vector, Spd, Any };

using Point = std::variant<Vector, SpdMatrix>;

/// sigma for the exp(-d^2/sigma^2) form that matches exp(-gamma d^2).
double sigma_from_gamma(double gamma);

class KernelSpec {
 public:
  /// Validates parameter ranges (sigma != 0, 0 < p <= 2, c >= 0, degree >= 1,
  /// stein sigma > 0).
  explicit KernelSpec(KernelParams params);

  const KernelParams& params() const noexcept { return params_; }
  PointKind domain() const noexcept;
  std::string describe() const;

 private:
  KernelParams params_;
};

double eval(const KernelSpec& spec, const Point& x, const Point& y);

struct GramMatrix {
  KernelSpec spec;
  Matrix entries;
};

/// All pairwise evaluations; points must be homogeneous and match spec.domain().
GramMatrix gram(const KernelSpec& spec, const std::vector<Point>& points);
GramMatrix gram(const KernelSpec& spec, const std::vector<SpdMatrix>& points);
GramMatrix gram(const KernelSpec& spec, const std::vector<Vector>& points);
/// Rectangular cross-Gram K[X, Y]_{jk} = k(x_j, y_k) for vectors stored as columns.
Matrix cross_gram(const KernelSpec& spec, const Matrix& xcols, const Matrix& ycols);

double min_eigenvalue(const Matrix& g);
double min_eigenvalue(const GramMatrix& g);
/// min eigenvalue >= -tol
bool is_psd(const Matrix& g, double tol);
/// Default relative tolerance 1e-9 * ||G||_2.
bool is_psd(const Matrix& g);

/// Largest value of c^T Phi c over unit c with sum(c) = 0, i.e. the top
/// eigenvalue of Phi compressed to the zero-sum subspace. <= 0 means the
/// pairwise function is conditionally negative definite on these points.
/// `trials` extra random zero-sum probes are folded into the maximum.
double negdef_check(const Matrix& phi, std::size_t trials, Rng& rng);

template <typename P, typename F>
double negdef_check(F&& phi, const std::vector<P>& points, std::size_t trials, Rng& rng) {
  const auto m = static_cast<Eigen::Index>(points.size());
  Matrix mat(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) mat(i, j) = phi(points[i], points[j]);
  return negdef_check(mat, trials, rng);
}

/// Membership of sigma in {1/2, 1, ..., (n-1)/2} U (n-1)/2, inf).
bool stein_admissible(int n, double sigma);

using SpdSampler = std::function<std::vector<SpdMatrix>(Rng&)>;

/// m in [m_lo, m_hi] matrices G G^T + eps I with G Gaussian n x n and eps log-uniform.
SpdSampler wishart_sampler(int n, int m_lo = 4, int m_hi = 12);

/// Points of a central-difference stencil for the Cayley operator det(d/dX),
/// centred at a random SPD base C C^T with random step h in [h_lo, h_hi].
/// For det(X + Y)^{-s} kernels the stencil quadratic form is proportional to
/// Gamma_n(s + 2) / Gamma_n(s), which is negative for s strictly between two
/// consecutive admissible half-integers below (n-1)/2. Requires 2 <= n <= 4.
SpdSampler cayley_stencil_sampler(int n, double h_lo = 0.2, double h_hi = 0.55);

/// Alternates Wishart and Cayley-stencil draws (stencil only when 2 <= n <= 4).
SpdSampler mixed_sampler(int n);

inline constexpr double kWitnessThreshold = -1e-8;

struct Witness {
  std::vector<SpdMatrix> points;
  double min_eigenvalue;
  std::size_t trial;
};

/// Draws point sets from `sampler` and returns the first whose Gram matrix has
/// min eigenvalue < kWitnessThreshold, or nullopt after `budget` Gram
/// evaluations. Trial i uses Rng::stream(seed, i), so the result does not
/// depend on the thread count.
std::optional<Witness> nonpd_witness_search(const KernelSpec& spec, const SpdSampler& sampler,
                                            std::size_t budget, std::uint64_t seed);

}  // namespace geoml::kern
