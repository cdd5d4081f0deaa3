#pragma once

// Regularized empirical risk minimization for conditional distributions on a
// discretized X x Y = grid x grid in [0,1]^2. x sits at (x, 0), y at (0, y)
// and the pair (x, y) at (x, y); all norms on measures are pulled back from a
// Gaussian RKHS on R^2, so on the grid the Gram matrix of pairs is Gx (x) Gy.

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "geoml/markov.hpp"
#include "geoml/random.hpp"

namespace geoml::erm {

class GridModel {
 public:
  /// Grids strictly increasing inside [0, 1]; sigma is the Gaussian bandwidth
  /// in exp(-|u - v|^2 / sigma^2).
  GridModel(std::vector<double> xgrid, std::vector<double> ygrid, double sigma = 0.5);
  /// p evenly spaced x points and q evenly spaced y points, endpoints included.
  static GridModel uniform(std::size_t p, std::size_t q, double sigma = 0.5);

  const std::vector<double>& xgrid() const noexcept { return xgrid_; }
  const std::vector<double>& ygrid() const noexcept { return ygrid_; }
  std::size_t p() const noexcept { return xgrid_.size(); }
  std::size_t q() const noexcept { return ygrid_.size(); }
  double sigma() const noexcept { return sigma_; }
  const markov::FiniteSpace& xspace() const noexcept { return xspace_; }
  const markov::FiniteSpace& yspace() const noexcept { return yspace_; }
  /// Gaussian Gram of the embedded x points / y points.
  const Matrix& gram_x() const noexcept { return gx_; }
  const Matrix& gram_y() const noexcept { return gy_; }

  bool operator==(const GridModel& o) const {
    return xgrid_ == o.xgrid_ && ygrid_ == o.ygrid_ && sigma_ == o.sigma_;
  }

 private:
  std::vector<double> xgrid_;
  std::vector<double> ygrid_;
  double sigma_;
  markov::FiniteSpace xspace_;
  markov::FiniteSpace yspace_;
  Matrix gx_;
  Matrix gy_;
};

class HypothesisField {
 public:
  /// rows: p x q row-stochastic. A finite lip_bound is enforced.
  HypothesisField(GridModel model, Matrix rows,
                  double lip_bound = std::numeric_limits<double>::infinity());
  static HypothesisField from_kernel(const GridModel& model, const markov::MarkovKernel& k);

  const GridModel& model() const noexcept { return model_; }
  const Matrix& rows() const noexcept { return rows_; }
  double lip_bound() const noexcept { return lip_bound_; }
  markov::MarkovKernel as_kernel() const;

 private:
  GridModel model_;
  Matrix rows_;
  double lip_bound_;
};

/// Regularization and slack sequences paired with increasing sample sizes.
struct Schedule {
  std::vector<double> gammas;
  std::vector<double> cs;

  /// Checks gammas strictly decreasing and positive, cs nonincreasing and >= 0.
  void validate() const;
  /// gamma_n = n^{-exponent}; c_n = gamma_n^2 when `slack`, else 0.
  static Schedule power(const std::vector<std::size_t>& sizes, double exponent, bool slack = true);
};

/// ||mu||_{K~1} for a signed p x q table over the grid pairs.
double ktilde_norm(const GridModel& model, const Matrix& table);
/// ||mu||_{K~1} for a signed vector over product(xspace, yspace), row-major.
double ktilde_norm(const GridModel& model, const markov::SignedVector& mu);
/// ||nu||_{K~2} for a signed vector over the y grid.
double ktilde2_norm(const GridModel& model, const Vector& nu);

/// max over x != x' of ||f(x) - f(x')||_{K~2} / |x - x'|
double lipschitz_constant(const HypothesisField& f);
/// max over x != x' of ||Gamma_f(x) - Gamma_f(x')||_{K~1} / |x - x'|
double graph_lipschitz_constant(const HypothesisField& f);
/// sup_x (||f(x)||_{K~2} + ||delta_x (x) f(x)||_{K~1})
double m_norm(const HypothesisField& f);
/// sup_x (||(f - f')(x)||_{K~2} + ||Gamma_f(x) - Gamma_f'(x)||_{K~1})
double dM_distance(const HypothesisField& f, const HypothesisField& g);
/// ||f||_M + L(f) + L_Gamma(f)
double w_functional(const HypothesisField& f);

using GridSample = std::vector<std::pair<std::size_t, std::size_t>>;

/// Normalized counts of (x index, y index) pairs.
markov::JointMeasure empirical_joint(const GridModel& model, const GridSample& s);

/// ||(Gamma_f)_* mu_X - mu||_{K~1}
double loss(const HypothesisField& f, const markov::JointMeasure& mu);
/// loss(f, mu_S)^2 + gamma W(f)
double regularized_risk(const HypothesisField& f, const markov::JointMeasure& mu_s, double gamma);

struct ErmOptions {
  std::size_t budget = 10000;  // objective evaluations across all restarts
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
};

struct ErmResult {
  HypothesisField field;
  double risk;
  std::size_t evaluations;
};

/// Projected block-coordinate descent over rows with restarts; the first start
/// is the disintegration of mu_S, the second the uniform field, the rest are
/// random. A restart stops once a full sweep improves by less than
/// max(c, 1e-14).
ErmResult erm_minimize(const GridModel& model, const markov::JointMeasure& mu_s, double gamma, double c,
                       const ErmOptions& opts = {});

/// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& v);

/// All compositions of round(1/step) into q parts, scaled by step.
std::vector<Vector> simplex_lattice(std::size_t q, double step);

/// Exhaustive minimum of `objective` over fields whose rows lie on the simplex
/// lattice. Throws when more than `max_fields` would be enumerated.
std::pair<double, HypothesisField> lattice_baseline(
    const GridModel& model, double step, const std::function<double(const HypothesisField&)>& objective,
    std::size_t max_fields = 5000000);

/// Best of `draws` random Dirichlet fields; only for grids up to 4 x 4.
std::pair<double, HypothesisField> random_search_baseline(
    const GridModel& model, std::size_t draws, std::uint64_t seed,
    const std::function<double(const HypothesisField&)>& objective);

/// loss(f, mu) - baseline, where baseline estimates inf over the class.
double estimation_error(const HypothesisField& f, const markov::JointMeasure& mu, double baseline);

/// Joint measure with uniform x marginal and conditional rows proportional to
/// exp(-(y - (a + b x))^2 / (2 width^2)) on the y grid.
markov::JointMeasure gaussian_bump_joint(const GridModel& model, double a = 0.2, double b = 0.6,
                                         double width = 0.15);

/// n i.i.d. grid pairs from mu.
GridSample sample_joint(const markov::JointMeasure& mu, std::size_t n, Rng& rng);

struct CurveRow {
  std::size_t n;
  double gamma;
  double c;
  double median_dM;
  double failure_rate;  // fraction of seeds with dM > eps
};

/// Per size, median over seeds of dM(ERM output, true conditional). Unit
/// (size k, seed s) draws its sample from Rng::stream(seed, s * sizes + k).
std::vector<CurveRow> learning_curve(const GridModel& model, const markov::JointMeasure& mu_true,
                                     const std::vector<std::size_t>& sizes, const Schedule& schedule,
                                     std::size_t seeds, double eps, const ErmOptions& opts = {});

}  // namespace geoml::erm
