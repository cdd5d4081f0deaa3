#include "geoml/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoml/parallel.hpp"

namespace geoml::rkhs {

namespace {

void require_vector_kernel(const kern::KernelSpec& spec, const char* what) {
  if (spec.domain() == kern::PointKind::Spd) {
    throw ValidationError(std::string(what) + ": kernel must accept vectors");
  }
}

// Clip tiny negative squared norms from cancellation; anything larger is an error.
double clipped_sqrt(double sq, double scale, const char* what) {
  if (sq >= 0.0) return std::sqrt(sq);
  if (sq >= -1e-12 * std::max(1.0, scale)) return 0.0;
  throw NumericalError(std::string(what) + ": negative squared norm " + std::to_string(sq));
}

struct SpectralSummary {
  Matrix vectors;
  Vector values;
};

SpectralSummary psd_eig(const Matrix& m, const char* what) {
  auto eig = sym_eig(SymMatrix::symmetrized(m));
  const double top = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    double& l = eig.eigenvalues(i);
    if (l < 0.0) {
      if (l < -1e-10 * top) {
        throw NumericalError(std::string(what) + ": Gram block is not positive semidefinite");
      }
      l = 0.0;
    }
  }
  return {std::move(eig.eigenvectors), std::move(eig.eigenvalues)};
}

double log1p_frob_sq(const Vector& lambda) {
  return lambda.unaryExpr([](double l) { return std::log1p(l); }).squaredNorm();
}

Matrix log_ratio_matrix(const SpectralSummary& s) {
  const Vector h = s.values.unaryExpr([](double l) { return log_ratio(l); });
  return s.vectors * h.asDiagonal() * s.vectors.transpose();
}

// tr[B*A h(A*A) A*B h(B*B)]
double cross_term(const CovBlocks& blocks, const SpectralSummary& sa, const SpectralSummary& sb) {
  const Matrix ha = log_ratio_matrix(sa);
  const Matrix hb = log_ratio_matrix(sb);
  const Matrix left = blocks.ba * ha * blocks.ab;
  return (left.array() * hb.transpose().array()).sum();
}

// Lexicographic order on (shape, entries, weights). Symmetric quantities are
// evaluated with the arguments in this order so that swapping them is bitwise exact.
bool swapped_order(const Matrix& a, const Vector& wa, const Matrix& b, const Vector& wb) {
  if (a.rows() != b.rows()) return a.rows() > b.rows();
  if (a.cols() != b.cols()) return a.cols() > b.cols();
  const auto lex = [](const auto& x, const auto& y) {
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  };
  if (lex(b, a)) return true;
  if (lex(a, b)) return false;
  return lex(wb, wa);
}

}  // namespace

Sample::Sample(Matrix points)
    : Sample(points, Vector::Constant(points.cols(), 1.0 / static_cast<double>(points.cols()))) {}

Sample::Sample(Matrix points, Vector weights) : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.cols() == 0) throw ValidationError("Sample: no points");
  if (weights_.size() != points_.cols()) throw ValidationError("Sample: weight count mismatch");
  if (!points_.allFinite() || !weights_.allFinite()) throw ValidationError("Sample: non-finite entry");
}

double mmd(const kern::KernelSpec& spec, const Sample& s1, const Sample& s2) {
  require_vector_kernel(spec, "mmd");
  if (swapped_order(s1.points(), s1.weights(), s2.points(), s2.weights())) return mmd(spec, s2, s1);
  require_same_dim(s1.ambient_dim(), s2.ambient_dim(), "mmd");
  const Matrix k11 = kern::cross_gram(spec, s1.points(), s1.points());
  const Matrix k22 = kern::cross_gram(spec, s2.points(), s2.points());
  const Matrix k12 = kern::cross_gram(spec, s1.points(), s2.points());
  const double a = s1.weights().dot(k11 * s1.weights());
  const double c = s2.weights().dot(k22 * s2.weights());
  const double b = s1.weights().dot(k12 * s2.weights());
  return clipped_sqrt(a - 2.0 * b + c, std::abs(a) + std::abs(c), "mmd");
}

double signed_embedding_norm(const kern::KernelSpec& spec, const Matrix& points, const Vector& w) {
  require_vector_kernel(spec, "signed_embedding_norm");
  if (w.size() != points.cols()) throw ValidationError("signed_embedding_norm: weight count mismatch");
  const Matrix k = kern::cross_gram(spec, points, points);
  const double scale = w.cwiseAbs().dot(k.cwiseAbs() * w.cwiseAbs());
  return clipped_sqrt(w.dot(k * w), scale, "signed_embedding_norm");
}

double concentration_bound(std::size_t n, double eps, double kbar) {
  if (n == 0) throw ValidationError("concentration_bound: n must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("concentration_bound: eps must lie in (0, 1)");
  if (!(kbar >= 0.0)) throw ValidationError("concentration_bound: kbar must be nonnegative");
  const double nn = static_cast<double>(n);
  return 2.0 * std::sqrt(kbar / nn) + std::sqrt(2.0 * std::log(1.0 / eps) / nn);
}

ConcentrationReport concentration_montecarlo(const kern::KernelSpec& spec, const PointSampler& mu,
                                             std::size_t n, double eps, std::size_t trials,
                                             std::uint64_t seed, std::size_t proxy_factor) {
  require_vector_kernel(spec, "concentration_montecarlo");
  if (trials == 0 || proxy_factor == 0) {
    throw ValidationError("concentration_montecarlo: trials and proxy_factor must be positive");
  }
  const std::size_t ref_size = proxy_factor * n;
  // Stream index 0 is the reference; trial t uses stream t + 1.
  Rng ref_rng = Rng::stream(seed, 0);
  const Vector first = mu(ref_rng);
  Matrix ref(first.size(), static_cast<Eigen::Index>(ref_size));
  ref.col(0) = first;
  for (Eigen::Index j = 1; j < ref.cols(); ++j) ref.col(j) = mu(ref_rng);

  double kbar = 0.0;
  for (Eigen::Index j = 0; j < ref.cols(); ++j) {
    const Vector v = ref.col(j);
    kbar += kern::eval(spec, kern::Point(v), kern::Point(v));
  }
  kbar /= static_cast<double>(ref.cols());
  const double bound = concentration_bound(n, eps, kbar);

  // Reference self term computed once, in row blocks to bound memory.
  const double inv_ref = 1.0 / static_cast<double>(ref_size);
  double ref_self = 0.0;
  constexpr Eigen::Index kBlock = 512;
  for (Eigen::Index s = 0; s < ref.cols(); s += kBlock) {
    const Eigen::Index len = std::min(kBlock, ref.cols() - s);
    ref_self += kern::cross_gram(spec, ref.middleCols(s, len), ref).sum();
  }
  ref_self *= inv_ref * inv_ref;

  std::vector<double> dist(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = Rng::stream(seed, t + 1);
    Matrix pts(ref.rows(), static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < pts.cols(); ++j) pts.col(j) = mu(rng);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double self = kern::cross_gram(spec, pts, pts).sum() * inv_n * inv_n;
    const double cross = kern::cross_gram(spec, pts, ref).sum() * inv_n * inv_ref;
    dist[t] = clipped_sqrt(self - 2.0 * cross + ref_self, self + ref_self, "concentration_montecarlo");
  });

  std::size_t failures = 0;
  double total = 0.0;
  for (double d : dist) {
    if (d > bound) ++failures;
    total += d;
  }
  return {static_cast<double>(failures) / static_cast<double>(trials), bound,
          total / static_cast<double>(trials), kbar, ref_size};
}

ProductEmbedding ProductEmbedding::simplex(std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) throw ValidationError("ProductEmbedding: empty space");
  const auto d = static_cast<Eigen::Index>(nx + ny);
  ProductEmbedding e{Matrix::Zero(d, static_cast<Eigen::Index>(nx)),
                     Matrix::Zero(d, static_cast<Eigen::Index>(ny))};
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(nx); ++i) e.x_coords(i, i) = 1.0;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(ny); ++j) {
    e.y_coords(static_cast<Eigen::Index>(nx) + j, j) = 1.0;
  }
  return e;
}

Matrix ProductEmbedding::pair_points() const {
  require_same_dim(x_coords.rows(), y_coords.rows(), "ProductEmbedding");
  const auto nx = x_coords.cols();
  const auto ny = y_coords.cols();
  Matrix out(x_coords.rows(), nx * ny);
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y) out.col(x * ny + y) = x_coords.col(x) + y_coords.col(y);
  return out;
}

double correct_loss(const kern::KernelSpec& spec, const markov::MarkovKernel& h,
                    const markov::JointMeasure& mu, const ProductEmbedding& embed) {
  if (!(h.source() == mu.xspace()) || !(h.target() == mu.yspace())) {
    throw ValidationError("correct_loss: kernel and measure live on different spaces");
  }
  if (embed.x_coords.cols() != static_cast<Eigen::Index>(mu.xspace().size()) ||
      embed.y_coords.cols() != static_cast<Eigen::Index>(mu.yspace().size())) {
    throw ValidationError("correct_loss: embedding does not match the spaces");
  }
  const auto pushed = markov::graph_pushforward(h, markov::marginal_x(mu));
  const Vector w = pushed.flattened().weights() - mu.flattened().weights();
  return signed_embedding_norm(spec, embed.pair_points(), w);
}

void RegularizedCovariancePair::validate() const {
  require_vector_kernel(spec, "loghs_cov_distance");
  if (data1.cols() < 1 || data2.cols() < 1) throw ValidationError("covariance data: need m >= 1");
  require_same_dim(data1.rows(), data2.rows(), "covariance data");
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !std::isfinite(gamma1) || !std::isfinite(gamma2)) {
    throw ValidationError("covariance regularization gamma must be positive");
  }
}

Matrix centering(Eigen::Index m) {
  return Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
}

CovBlocks cov_gram_blocks(const RegularizedCovariancePair& pair) {
  pair.validate();
  const auto m1 = pair.data1.cols();
  const auto m2 = pair.data2.cols();
  const Matrix j1 = centering(m1);
  const Matrix j2 = centering(m2);
  const double d1 = static_cast<double>(m1);
  const double d2 = static_cast<double>(m2);
  CovBlocks b;
  b.aa = j1 * kern::cross_gram(pair.spec, pair.data1, pair.data1) * j1 / (d1 * pair.gamma1);
  b.bb = j2 * kern::cross_gram(pair.spec, pair.data2, pair.data2) * j2 / (d2 * pair.gamma2);
  b.ab = j1 * kern::cross_gram(pair.spec, pair.data1, pair.data2) * j2 /
         std::sqrt(d1 * d2 * pair.gamma1 * pair.gamma2);
  b.ba = b.ab.transpose();
  return b;
}

double log_ratio(double lambda) {
  if (lambda == 0.0) return 1.0;
  return std::log1p(lambda) / lambda;
}

double loghs_cov_distance(const RegularizedCovariancePair& pair) {
  if (swapped_order(pair.data1, Vector::Constant(1, pair.gamma1), pair.data2, Vector::Constant(1, pair.gamma2))) {
    return loghs_cov_distance({pair.data2, pair.data1, pair.gamma2, pair.gamma1, pair.spec});
  }
  const CovBlocks blocks = cov_gram_blocks(pair);
  const auto sa = psd_eig(blocks.aa, "loghs_cov_distance");
  const auto sb = psd_eig(blocks.bb, "loghs_cov_distance");
  const double fa = log1p_frob_sq(sa.values);
  const double fb = log1p_frob_sq(sb.values);
  const double cross = cross_term(blocks, sa, sb);
  const double lg = std::log(pair.gamma2 / pair.gamma1);
  const double sq = fa + fb - 2.0 * cross + lg * lg;
  return clipped_sqrt(sq, fa + fb, "loghs_cov_distance");
}

double loghs_cov_inner(const RegularizedCovariancePair& pair) {
  const CovBlocks blocks = cov_gram_blocks(pair);
  const auto sa = psd_eig(blocks.aa, "loghs_cov_inner");
  const auto sb = psd_eig(blocks.bb, "loghs_cov_inner");
  return cross_term(blocks, sa, sb) + std::log(pair.gamma1) * std::log(pair.gamma2);
}

Matrix two_layer_distance_matrix(const std::vector<Matrix>& datasets, const kern::KernelSpec& k1,
                                 double gamma) {
  const auto n = static_cast<Eigen::Index>(datasets.size());
  if (n == 0) throw ValidationError("two_layer_distance_matrix: no datasets");
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    values[k] = loghs_cov_distance({datasets[i], datasets[j], gamma, gamma, k1});
  });
  Matrix d = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    d(pairs[k].first, pairs[k].second) = values[k];
    d(pairs[k].second, pairs[k].first) = values[k];
  }
  return d;
}

Matrix two_layer_kernel(const Matrix& distances, double sigma2) {
  if (!std::isfinite(sigma2) || sigma2 == 0.0) throw ValidationError("two_layer_kernel: sigma must be nonzero");
  return (-distances.array().square() / (sigma2 * sigma2)).exp().matrix();
}

int classify_1nn(std::span<const double> distances, std::span<const int> labels) {
  if (distances.empty() || distances.size() != labels.size()) {
    throw ValidationError("classify_1nn: need matching, nonempty distances and labels");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < distances.size(); ++i) {
    if (distances[i] < distances[best]) best = i;
  }
  return labels[best];
}

}  // namespace geoml::rkhs
