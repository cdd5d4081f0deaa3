#include "geoml/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "geoml/parallel.hpp"

namespace geoml::kern {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_sigma(double sigma) {
  if (!std::isfinite(sigma) || sigma == 0.0) throw ValidationError("kernel sigma must be nonzero");
}

void check_p(double p) {
  if (!(p > 0.0 && p <= 2.0)) throw ValidationError("kernel exponent p must lie in (0, 2]");
}

const SpdMatrix& as_spd(const Point& p) {
  if (const auto* m = std::get_if<SpdMatrix>(&p)) return *m;
  throw ValidationError("kernel expects SPD matrix points");
}

const Vector& as_vector(const Point& p) {
  if (const auto* v = std::get_if<Vector>(&p)) return *v;
  throw ValidationError("kernel expects vector points");
}

double gaussian_of(double d, double sigma, double p) {
  return std::exp(-std::pow(d, p) / (sigma * sigma));
}

double stein_from_logdets(double sigma, double ld_a, double ld_b, double ld_mid) {
  return std::exp(sigma * (0.5 * ld_a + 0.5 * ld_b - ld_mid));
}

double logdet_mid(const SpdMatrix& a, const SpdMatrix& b) {
  return logdet_spd(SpdMatrix(SymMatrix::symmetrized(0.5 * (a.matrix() + b.matrix()))));
}

void fill_symmetric(Matrix& g, const std::function<double(Eigen::Index, Eigen::Index)>& f) {
  const auto m = g.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = f(i, j);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
}

}  // namespace

double sigma_from_gamma(double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  return 1.0 / std::sqrt(gamma);
}

KernelSpec::KernelSpec(KernelParams params) : params_(std::move(params)) {
  std::visit(overloaded{
                 [](const GaussianMetric& k) {
                   check_sigma(k.sigma);
                   check_p(k.p);
                 },
                 [](const LogEPoly& k) {
                   if (!(k.c >= 0.0)) throw ValidationError("logE polynomial c must be >= 0");
                   if (k.degree < 1) throw ValidationError("logE polynomial degree must be >= 1");
                 },
                 [](const LogEExp& k) {
                   check_sigma(k.sigma);
                   check_p(k.p);
                 },
                 [](const Stein& k) {
                   if (!(k.sigma > 0.0)) throw ValidationError("stein sigma must be > 0");
                 },
                 [](const EuclideanGaussian& k) { check_sigma(k.sigma); },
                 [](const Linear&) {},
             },
             params_);
}

PointKind KernelSpec::domain() const noexcept {
  return std::visit(overloaded{
                        [](const EuclideanGaussian&) { return PointKind::Vector; },
                        [](const Linear&) { return PointKind::Any; },
                        [](const auto&) { return PointKind::Spd; },
                    },
                    params_);
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const GaussianMetric& k) {
                   os << "gaussian_metric(" << spd::metric_name(k.metric) << ",sigma=" << k.sigma
                      << ",p=" << k.p << ")";
                 },
                 [&](const LogEPoly& k) {
                   os << "loge_poly(c=" << k.c << ",degree=" << k.degree << ")";
                 },
                 [&](const LogEExp& k) { os << "loge_exp(sigma=" << k.sigma << ",p=" << k.p << ")"; },
                 [&](const Stein& k) { os << "stein(sigma=" << k.sigma << ")"; },
                 [&](const EuclideanGaussian& k) { os << "euclidean_gaussian(sigma=" << k.sigma << ")"; },
                 [&](const Linear&) { os << "linear"; },
             },
             params_);
  return os.str();
}

double eval(const KernelSpec& spec, const Point& x, const Point& y) {
  if (x.index() != y.index()) throw ValidationError("kernel arguments have different point kinds");
  return std::visit(
      overloaded{
          [&](const GaussianMetric& k) {
            return gaussian_of(spd::distance(k.metric, as_spd(x), as_spd(y)), k.sigma, k.p);
          },
          [&](const LogEPoly& k) {
            return std::pow(spd::loge_inner(as_spd(x), as_spd(y)) + k.c, k.degree);
          },
          [&](const LogEExp& k) {
            return gaussian_of(spd::loge_distance(as_spd(x), as_spd(y)), k.sigma, k.p);
          },
          [&](const Stein& k) {
            const auto& a = as_spd(x);
            const auto& b = as_spd(y);
            require_same_dim(a.dim(), b.dim(), "stein kernel");
            return stein_from_logdets(k.sigma, logdet_spd(a), logdet_spd(b), logdet_mid(a, b));
          },
          [&](const EuclideanGaussian& k) {
            const auto& a = as_vector(x);
            const auto& b = as_vector(y);
            require_same_dim(a.size(), b.size(), "euclidean gaussian kernel");
            return gaussian_of((a - b).norm(), k.sigma, 2.0);
          },
          [&](const Linear&) {
            if (const auto* a = std::get_if<Vector>(&x)) {
              const auto& b = std::get<Vector>(y);
              require_same_dim(a->size(), b.size(), "linear kernel");
              return a->dot(b);
            }
            return frobenius_inner(std::get<SpdMatrix>(x).sym(), std::get<SpdMatrix>(y).sym());
          },
      },
      spec.params());
}

GramMatrix gram(const KernelSpec& spec, const std::vector<SpdMatrix>& points) {
  if (points.empty()) throw ValidationError("gram: empty point list");
  if (spec.domain() == PointKind::Vector) throw ValidationError("gram: kernel expects vectors");
  for (const auto& p : points) require_same_dim(p.dim(), points.front().dim(), "gram");
  const auto m = static_cast<Eigen::Index>(points.size());
  Matrix g(m, m);
  std::visit(
      overloaded{
          [&](const LogEPoly& k) {
            std::vector<SymMatrix> logs;
            logs.reserve(points.size());
            for (const auto& p : points) logs.push_back(logm_spd(p));
            fill_symmetric(g, [&](auto i, auto j) {
              return std::pow(frobenius_inner(logs[i], logs[j]) + k.c, k.degree);
            });
          },
          [&](const LogEExp& k) {
            std::vector<Matrix> logs;
            logs.reserve(points.size());
            for (const auto& p : points) logs.push_back(logm_spd(p).matrix());
            fill_symmetric(g, [&](auto i, auto j) {
              return gaussian_of((logs[i] - logs[j]).norm(), k.sigma, k.p);
            });
          },
          [&](const Stein& k) {
            std::vector<double> ld;
            ld.reserve(points.size());
            for (const auto& p : points) ld.push_back(logdet_spd(p));
            fill_symmetric(g, [&](auto i, auto j) {
              if (i == j) return 1.0;
              return stein_from_logdets(k.sigma, ld[i], ld[j], logdet_mid(points[i], points[j]));
            });
          },
          [&](const auto&) {
            fill_symmetric(g, [&](auto i, auto j) {
              return eval(spec, Point(points[i]), Point(points[j]));
            });
          },
      },
      spec.params());
  return {spec, std::move(g)};
}

GramMatrix gram(const KernelSpec& spec, const std::vector<Vector>& points) {
  if (points.empty()) throw ValidationError("gram: empty point list");
  if (spec.domain() == PointKind::Spd) throw ValidationError("gram: kernel expects SPD matrices");
  const auto m = static_cast<Eigen::Index>(points.size());
  Matrix g(m, m);
  fill_symmetric(g, [&](auto i, auto j) { return eval(spec, Point(points[i]), Point(points[j])); });
  return {spec, std::move(g)};
}

GramMatrix gram(const KernelSpec& spec, const std::vector<Point>& points) {
  if (points.empty()) throw ValidationError("gram: empty point list");
  const auto kind = points.front().index();
  for (const auto& p : points) {
    if (p.index() != kind) throw ValidationError("gram: heterogeneous point list");
  }
  if (kind == 0) {
    std::vector<Vector> v;
    for (const auto& p : points) v.push_back(std::get<Vector>(p));
    return gram(spec, v);
  }
  std::vector<SpdMatrix> s;
  for (const auto& p : points) s.push_back(std::get<SpdMatrix>(p));
  return gram(spec, s);
}

Matrix cross_gram(const KernelSpec& spec, const Matrix& xcols, const Matrix& ycols) {
  require_same_dim(xcols.rows(), ycols.rows(), "cross_gram");
  if (spec.domain() == PointKind::Spd) throw ValidationError("cross_gram: kernel expects vectors");
  Matrix g(xcols.cols(), ycols.cols());
  if (std::holds_alternative<Linear>(spec.params())) {
    g.noalias() = xcols.transpose() * ycols;
    return g;
  }
  if (const auto* eg = std::get_if<EuclideanGaussian>(&spec.params())) {
    const Vector xn = xcols.colwise().squaredNorm().transpose();
    const Vector yn = ycols.colwise().squaredNorm().transpose();
    g.noalias() = -2.0 * xcols.transpose() * ycols;
    g.colwise() += xn;
    g.rowwise() += yn.transpose();
    const double s2 = eg->sigma * eg->sigma;
    g = (-(g.array().max(0.0)) / s2).exp().matrix();
    return g;
  }
  for (Eigen::Index i = 0; i < xcols.cols(); ++i)
    for (Eigen::Index j = 0; j < ycols.cols(); ++j)
      g(i, j) = eval(spec, Point(Vector(xcols.col(i))), Point(Vector(ycols.col(j))));
  return g;
}

double min_eigenvalue(const Matrix& g) {
  return sym_eig(SymMatrix::symmetrized(g)).eigenvalues(0);
}

double min_eigenvalue(const GramMatrix& g) { return min_eigenvalue(g.entries); }

bool is_psd(const Matrix& g, double tol) { return min_eigenvalue(g) >= -tol; }

bool is_psd(const Matrix& g) {
  const auto ev = sym_eig(SymMatrix::symmetrized(g)).eigenvalues;
  const double spectral = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return ev(0) >= -1e-9 * spectral;
}

double negdef_check(const Matrix& phi, std::size_t trials, Rng& rng) {
  const auto m = phi.rows();
  if (m < 2 || phi.cols() != m) throw ValidationError("negdef_check: need a square matrix, m >= 2");
  // Orthonormal basis of {c : sum c = 0}: QR of the centering matrix's first m-1 columns.
  Matrix center = Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
  Eigen::HouseholderQR<Matrix> qr(center.leftCols(m - 1));
  const Matrix basis = Matrix(qr.householderQ()).leftCols(m - 1);
  const Matrix sym = 0.5 * (phi + phi.transpose());
  const Matrix compressed = basis.transpose() * sym * basis;
  double worst = sym_eig(SymMatrix::symmetrized(compressed)).eigenvalues(m - 2);
  for (std::size_t t = 0; t < trials; ++t) {
    Vector c = rng.normal_vector(m);
    c.array() -= c.mean();
    const double nrm = c.norm();
    if (nrm == 0.0) continue;
    c /= nrm;
    worst = std::max(worst, c.dot(sym * c));
  }
  return worst;
}

bool stein_admissible(int n, double sigma) {
  if (n < 1) throw ValidationError("stein_admissible: n must be >= 1");
  if (!(sigma > 0.0)) throw ValidationError("stein_admissible: sigma must be > 0");
  const double threshold = 0.5 * (n - 1);
  if (sigma > threshold) return true;
  const double twice = 2.0 * sigma;
  const double k = std::round(twice);
  return k >= 1.0 && k <= n - 1 && std::abs(twice - k) <= 2e-12;
}

SpdSampler wishart_sampler(int n, int m_lo, int m_hi) {
  if (n < 1 || m_lo < 1 || m_hi < m_lo) throw ValidationError("wishart_sampler: bad sizes");
  return [n, m_lo, m_hi](Rng& rng) {
    const auto m = rng.integer(m_lo, m_hi);
    std::vector<SpdMatrix> pts;
    pts.reserve(static_cast<std::size_t>(m));
    while (static_cast<std::int64_t>(pts.size()) < m) {
      const Matrix g = rng.normal_matrix(n, n);
      const double eps = std::pow(10.0, rng.uniform(-3.0, 0.0));
      try {
        pts.emplace_back(SymMatrix::symmetrized(g * g.transpose() + eps * Matrix::Identity(n, n)));
      } catch (const NumericalError&) {
        // too ill-conditioned; redraw
      }
    }
    return pts;
  };
}

namespace {

// Offsets (in units of h/2 along the symmetric basis directions) of the
// central-difference stencil of det(D), D_ii = d/dx_ii, D_ij = (1/2) d/dx_ij.
std::vector<std::vector<int>> cayley_offsets(int n) {
  std::vector<std::pair<int, int>> vars;
  std::map<std::pair<int, int>, int> index;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      index[{i, j}] = static_cast<int>(vars.size());
      vars.emplace_back(i, j);
    }
  std::map<std::vector<int>, double> monomials;  // sorted var list -> coefficient
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    int inversions = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (perm[a] > perm[b]) ++inversions;
    double coef = (inversions % 2 == 0) ? 1.0 : -1.0;
    std::vector<int> key;
    for (int r = 0; r < n; ++r) {
      const int i = std::min(r, perm[r]);
      const int j = std::max(r, perm[r]);
      if (i != j) coef *= 0.5;
      key.push_back(index[{i, j}]);
    }
    std::sort(key.begin(), key.end());
    monomials[key] += coef;
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::map<std::vector<int>, double> stencil;
  const int nvars = static_cast<int>(vars.size());
  for (const auto& [key, coef] : monomials) {
    if (std::abs(coef) < 1e-15) continue;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> off(static_cast<std::size_t>(nvars), 0);
      double sign = 1.0;
      for (int k = 0; k < n; ++k) {
        const bool plus = (mask >> k) & 1;
        off[static_cast<std::size_t>(key[static_cast<std::size_t>(k)])] += plus ? 1 : -1;
        if (!plus) sign = -sign;
      }
      stencil[off] += sign * coef;
    }
  }
  std::vector<std::vector<int>> out;
  for (const auto& [off, c] : stencil) {
    if (std::abs(c) > 1e-12) out.push_back(off);
  }
  return out;
}

Matrix basis_direction(int n, int var) {
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++k)
      if (k == var) {
        Matrix e = Matrix::Zero(n, n);
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        return e;
      }
  throw ValidationError("basis_direction: bad index");
}

}  // namespace

SpdSampler cayley_stencil_sampler(int n, double h_lo, double h_hi) {
  if (n < 2 || n > 4) throw ValidationError("cayley_stencil_sampler: n must be in [2, 4]");
  if (!(h_lo > 0.0 && h_hi >= h_lo)) throw ValidationError("cayley_stencil_sampler: bad step range");
  const auto offsets = cayley_offsets(n);
  const int nvars = n * (n + 1) / 2;
  std::vector<Matrix> dirs;
  for (int v = 0; v < nvars; ++v) dirs.push_back(basis_direction(n, v));
  return [n, h_lo, h_hi, offsets, dirs](Rng& rng) {
    for (;;) {
      const double h = rng.uniform(h_lo, h_hi);
      const Matrix c = random_invertible(n, rng);
      std::vector<SpdMatrix> pts;
      pts.reserve(offsets.size());
      try {
        for (const auto& off : offsets) {
          Matrix x = Matrix::Identity(n, n);
          for (std::size_t v = 0; v < off.size(); ++v) x += 0.5 * h * off[v] * dirs[v];
          pts.emplace_back(SymMatrix::symmetrized(c * x * c.transpose()));
        }
        return pts;
      } catch (const NumericalError&) {
        // step too large for this base; redraw
      }
    }
  };
}

SpdSampler mixed_sampler(int n) {
  auto wishart = wishart_sampler(n);
  if (n < 2 || n > 4) return wishart;
  auto stencil = cayley_stencil_sampler(n);
  return [wishart, stencil](Rng& rng) {
    return (rng.bits() & 1U) ? stencil(rng) : wishart(rng);
  };
}

std::optional<Witness> nonpd_witness_search(const KernelSpec& spec, const SpdSampler& sampler,
                                            std::size_t budget, std::uint64_t seed) {
  if (budget < 1) throw ValidationError("nonpd_witness_search: budget must be >= 1");
  if (spec.domain() == PointKind::Vector) {
    throw ValidationError("nonpd_witness_search: kernel must accept SPD matrices");
  }
  constexpr std::size_t kBatch = 64;
  for (std::size_t start = 0; start < budget; start += kBatch) {
    const std::size_t count = std::min(kBatch, budget - start);
    std::vector<std::optional<Witness>> found(count);
    parallel_for(count, [&](std::size_t k) {
      Rng rng = Rng::stream(seed, start + k);
      auto pts = sampler(rng);
      const double lo = min_eigenvalue(gram(spec, pts));
      if (lo < kWitnessThreshold) found[k] = Witness{std::move(pts), lo, start + k};
    });
    for (auto& w : found) {
      if (w) return w;
    }
  }
  return std::nullopt;
}

}  // namespace geoml::kern
