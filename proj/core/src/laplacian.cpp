#include "geoml/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geoml/parallel.hpp"
#include "geoml/random.hpp"

namespace geoml::lap {

namespace {

void check_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("heat scale t must be positive");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

Vector unit_circle(Rng& rng) {
  const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
  Vector v(2);
  v << std::cos(th), std::sin(th);
  return v;
}

}  // namespace

PointCloud::PointCloud(Matrix points, int manifold_dim)
    : points_(std::move(points)), manifold_dim_(manifold_dim) {
  if (points_.cols() < 2) throw ValidationError("PointCloud: need at least 2 points");
  if (points_.rows() < 1) throw ValidationError("PointCloud: ambient dimension must be positive");
  if (manifold_dim_ < 1) throw ValidationError("PointCloud: manifold dimension must be positive");
  if (!points_.allFinite()) throw ValidationError("PointCloud: non-finite coordinate");
}

HeatWeights heat_weights(const PointCloud& cloud, double t) {
  check_t(t);
  const Matrix& x = cloud.points();
  const auto m = x.cols();
  Matrix w(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    w(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = std::exp(-(x.col(i) - x.col(j)).squaredNorm() / (4.0 * t));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return {t, std::move(w)};
}

double quadratic_form(const HeatWeights& w, const Vector& z) {
  const auto m = w.matrix.rows();
  if (z.size() != m) throw ValidationError("quadratic_form: vector length mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = z(i) - z(j);
      s += w.matrix(i, j) * d * d;
    }
  return 0.5 * s;
}

Vector graph_laplacian_apply(const HeatWeights& w, const Vector& z) {
  if (z.size() != w.matrix.rows()) throw ValidationError("graph_laplacian_apply: length mismatch");
  const Vector deg = w.matrix.rowwise().sum();
  return deg.cwiseProduct(z) - w.matrix * z;
}

double pointcloud_laplacian(const PointCloud& cloud, double t, const ScalarField& f, const Vector& x) {
  check_t(t);
  require_same_dim(x.size(), cloud.ambient_dim(), "pointcloud_laplacian");
  const Matrix& pts = cloud.points();
  const double fx = f(x);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    const Vector xj = pts.col(j);
    const double k = std::exp(-(x - xj).squaredNorm() / (4.0 * t));
    acc += (fx - f(xj)) * k;
  }
  return acc / static_cast<double>(pts.cols());
}

double bn_scale(std::size_t m, int n, double alpha) {
  if (m < 1) throw ValidationError("bn_scale: m must be positive");
  if (n < 1) throw ValidationError("bn_scale: manifold dimension must be positive");
  if (!(alpha > 0.0)) throw ValidationError("bn_scale: alpha must be positive");
  return std::pow(static_cast<double>(m), -1.0 / (n + 2.0 + alpha));
}

double bn_estimate(const PointCloud& cloud, const ScalarField& f, const Vector& p, double alpha) {
  const int n = cloud.manifold_dim();
  const double t = bn_scale(static_cast<std::size_t>(cloud.size()), n, alpha);
  const double norm = t * std::pow(4.0 * std::numbers::pi * t, 0.5 * n);
  return pointcloud_laplacian(cloud, t, f, p) / norm;
}

PointCloud sample_circle(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts(2, static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < pts.cols(); ++j) pts.col(j) = unit_circle(rng);
  return PointCloud(std::move(pts), 1);
}

PointCloud sample_sphere(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts(3, static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    Vector g = rng.normal_vector(3);
    double nrm = g.norm();
    while (nrm == 0.0) {
      g = rng.normal_vector(3);
      nrm = g.norm();
    }
    pts.col(j) = g / nrm;
  }
  return PointCloud(std::move(pts), 2);
}

PointCloud sample_flat_torus(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts(4, static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    pts.col(j).head(2) = unit_circle(rng);
    pts.col(j).tail(2) = unit_circle(rng);
  }
  return PointCloud(std::move(pts), 2);
}

Manifold parse_manifold(const std::string& name) {
  if (name == "circle") return Manifold::Circle;
  if (name == "sphere") return Manifold::Sphere;
  if (name == "torus") return Manifold::FlatTorus;
  throw ValidationError("unknown manifold '" + name + "' (expected circle, sphere or torus)");
}

std::string manifold_name(Manifold m) {
  switch (m) {
    case Manifold::Circle: return "circle";
    case Manifold::Sphere: return "sphere";
    case Manifold::FlatTorus: return "torus";
  }
  return "?";
}

Eigenfunction analytic_laplacian(Manifold manifold, const std::string& id) {
  constexpr double pi = std::numbers::pi;
  const auto zero = [](const Vector&) { return 0.0; };
  switch (manifold) {
    case Manifold::Circle:
      if (id == "const") return {[](const Vector&) { return 1.0; }, zero, 0.0, 2 * pi, 1};
      // cos(theta) is the first coordinate; -(cos)'' = cos.
      if (id == "cos") return {[](const Vector& v) { return v(0); }, [](const Vector& v) { return v(0); }, 1.0, 2 * pi, 1};
      break;
    case Manifold::Sphere:
      if (id == "const") return {[](const Vector&) { return 1.0; }, zero, 0.0, 4 * pi, 2};
      if (id == "z") {
        return {[](const Vector& v) { return v(2); }, [](const Vector& v) { return 2.0 * v(2); }, 2.0, 4 * pi, 2};
      }
      break;
    case Manifold::FlatTorus:
      if (id == "const") return {[](const Vector&) { return 1.0; }, zero, 0.0, 4 * pi * pi, 2};
      if (id == "cos1") {
        return {[](const Vector& v) { return v(0); }, [](const Vector& v) { return v(0); }, 1.0, 4 * pi * pi, 2};
      }
      break;
  }
  throw ValidationError("unknown eigenfunction '" + id + "' on " + manifold_name(manifold));
}

PointCloud sample(Manifold manifold, std::size_t m, std::uint64_t seed) {
  switch (manifold) {
    case Manifold::Circle: return sample_circle(m, seed);
    case Manifold::Sphere: return sample_sphere(m, seed);
    case Manifold::FlatTorus: return sample_flat_torus(m, seed);
  }
  throw ValidationError("unknown manifold");
}

Vector default_base_point(Manifold manifold) {
  switch (manifold) {
    case Manifold::Circle: return Vector::Unit(2, 0);
    case Manifold::Sphere: return Vector::Unit(3, 0);
    case Manifold::FlatTorus: {
      Vector p = Vector::Zero(4);
      p(0) = 1.0;
      p(2) = 1.0;
      return p;
    }
  }
  throw ValidationError("unknown manifold");
}

std::vector<ConvergenceRow> convergence_sweep(Manifold manifold, const std::string& eigenfunction,
                                              const Vector& p, const std::vector<std::size_t>& sizes,
                                              std::size_t seeds, double alpha, std::uint64_t base_seed) {
  if (sizes.empty() || seeds == 0) throw ValidationError("convergence_sweep: need sizes and seeds");
  const Eigenfunction ef = analytic_laplacian(manifold, eigenfunction);
  const double target = ef.laplacian_f(p) / ef.volume;
  if (target == 0.0) throw ValidationError("convergence_sweep: zero target, relative error undefined");
  const std::size_t units = sizes.size() * seeds;
  std::vector<double> err(units);
  parallel_for(units, [&](std::size_t u) {
    const std::size_t s = u / sizes.size();
    const std::size_t k = u % sizes.size();
    const std::uint64_t seed = Rng::stream(base_seed, s * sizes.size() + k).bits();
    const PointCloud cloud = sample(manifold, sizes[k], seed);
    err[u] = std::abs(bn_estimate(cloud, ef.f, p, alpha) - target) / std::abs(target);
  });
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    std::vector<double> e;
    for (std::size_t s = 0; s < seeds; ++s) e.push_back(err[s * sizes.size() + k]);
    rows.push_back({sizes[k], median(std::move(e))});
  }
  return rows;
}

}  // namespace geoml::lap
