#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cli.hpp"
#include "geoml/divergences.hpp"
#include "geoml/erm.hpp"
#include "geoml/io.hpp"
#include "geoml/laplacian.hpp"
#include "geoml/rkhs.hpp"
#include "geoml/spd_geometry.hpp"

namespace geoml::cli {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

SelftestResult geodesic_endpoints(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 1);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto n = rng.integer(2, 6);
    const auto a = random_spd(n, rng);
    const auto b = random_spd(n, rng);
    const double scale = a.matrix().norm();
    for (auto m : {spd::Metric::AffineInvariant, spd::Metric::BuresWasserstein, spd::Metric::LogEuclidean}) {
      worst = std::max(worst, (spd::geodesic(m, {a, b, 0.0}).matrix() - a.matrix()).norm() / scale);
      worst = std::max(worst, (spd::geodesic(m, {a, b, 1.0}).matrix() - b.matrix()).norm() / scale);
    }
  }
  return {"geodesic_endpoints", worst <= 1e-10, sci(worst)};
}

SelftestResult triangle(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 2);
  double worst = -1e300;
  for (int i = 0; i < 100; ++i) {
    const auto n = rng.integer(2, 5);
    const auto a = random_spd(n, rng);
    const auto b = random_spd(n, rng);
    const auto c = random_spd(n, rng);
    for (auto m : {spd::Metric::AffineInvariant, spd::Metric::LogEuclidean}) {
      const double excess = spd::distance(m, a, c) - spd::distance(m, a, b) - spd::distance(m, b, c);
      worst = std::max(worst, excess);
    }
  }
  return {"triangle_inequality", worst <= 1e-8, sci(worst)};
}

SelftestResult loge_kernel_psd(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 3);
  double worst = 1.0;
  for (int i = 0; i < 20; ++i) {
    const auto n = rng.integer(2, 4);
    std::vector<SpdMatrix> pts;
    for (int j = 0; j < 12; ++j) pts.push_back(random_spd(n, rng));
    const auto g = kern::gram(kern::KernelSpec(kern::LogEExp{1.0, 2.0}), pts);
    const auto ev = sym_eig(SymMatrix::symmetrized(g.entries)).eigenvalues;
    worst = std::min(worst, ev(0) / ev(ev.size() - 1));
  }
  return {"loge_gaussian_psd", worst >= -1e-9, sci(worst)};
}

SelftestResult stein_admissible_psd(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 4);
  double worst = 1.0;
  for (int i = 0; i < 20; ++i) {
    std::vector<SpdMatrix> pts;
    for (int j = 0; j < 10; ++j) pts.push_back(random_spd(3, rng));
    const auto g = kern::gram(kern::KernelSpec(kern::Stein{1.0}), pts);
    const auto ev = sym_eig(SymMatrix::symmetrized(g.entries)).eigenvalues;
    worst = std::min(worst, ev(0) / ev(ev.size() - 1));
  }
  return {"stein_sigma1_psd", worst >= -1e-9, sci(worst)};
}

SelftestResult loghs_scalar(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 5);
  double worst = 0.0;
  const kern::KernelSpec k(kern::EuclideanGaussian{1.0});
  for (int i = 0; i < 10; ++i) {
    const double g1 = std::exp(rng.uniform(-3.0, 3.0));
    const double g2 = std::exp(rng.uniform(-3.0, 3.0));
    const Matrix x1 = rng.normal_matrix(3, 1);
    const Matrix x2 = rng.normal_matrix(3, 1);
    const double d = rkhs::loghs_cov_distance({x1, x2, g1, g2, k});
    worst = std::max(worst, std::abs(d - std::abs(std::log(g1 / g2))));
  }
  return {"loghs_scalar_identity", worst <= 1e-12, sci(worst)};
}

SelftestResult concentration_value(std::uint64_t) {
  const double b = rkhs::concentration_bound(100, 0.1, 1.0);
  const double want = 0.2 + std::sqrt(2.0 * std::log(10.0) / 100.0);
  return {"concentration_bound_value", std::abs(b - want) <= 1e-15 && std::abs(b - 0.414599) < 5e-6, sci(b)};
}

SelftestResult disintegration(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 6);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto p = static_cast<std::size_t>(rng.integer(1, 6));
    const auto q = static_cast<std::size_t>(rng.integer(1, 6));
    Vector w = rng.dirichlet(static_cast<Eigen::Index>(p * q));
    Matrix t = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        w.data(), static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    const markov::JointMeasure mu(markov::FiniteSpace::indexed(p), markov::FiniteSpace::indexed(q), t);
    const auto d = markov::disintegrate(mu);
    const auto back = markov::graph_pushforward(d.kernel, d.marginal);
    worst = std::max(worst, (back.table() - mu.table()).cwiseAbs().maxCoeff());
  }
  return {"disintegration_roundtrip", worst <= 1e-12, sci(worst)};
}

SelftestResult dual_symmetry(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 7);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto n = rng.integer(2, 5);
    const auto a = random_spd(n, rng);
    const auto b = random_spd(n, rng);
    const div::AlphaParam al(rng.uniform(-1.0, 1.0));
    worst = std::max(worst, div::check_dual_symmetry(al, a, b));
  }
  return {"alpha_logdet_dual_symmetry", worst <= 1e-10, sci(worst)};
}

SelftestResult laplacian_form(std::uint64_t seed) {
  const auto cloud = lap::sample_circle(40, Rng::stream(seed, 8).bits());
  const auto w = lap::heat_weights(cloud, 0.1);
  Rng rng = Rng::stream(seed, 9);
  const Vector z = rng.normal_vector(40);
  const double q = lap::quadratic_form(w, z);
  const double alt = z.dot(lap::graph_laplacian_apply(w, z));
  const double gap = std::abs(q - alt) / std::max(1.0, std::abs(q));
  return {"graph_laplacian_identity", gap <= 1e-12 && q >= 0.0, sci(gap)};
}

SelftestResult erm_recovery(std::uint64_t seed) {
  const auto model = erm::GridModel::uniform(3, 3);
  const auto mu = erm::gaussian_bump_joint(model);
  Rng rng = Rng::stream(seed, 10);
  const auto emp = erm::empirical_joint(model, erm::sample_joint(mu, 200, rng));
  erm::ErmOptions o;
  o.budget = 2000;
  o.seed = seed;
  const auto res = erm::erm_minimize(model, emp, 0.0, 0.0, o);
  const double fit = erm::loss(res.field, emp);
  return {"erm_gamma0_fit", fit * fit <= 1e-8, sci(fit * fit)};
}

}  // namespace

std::vector<SelftestResult> selftest(std::uint64_t seed) {
  return {geodesic_endpoints(seed), triangle(seed),      loge_kernel_psd(seed), stein_admissible_psd(seed),
          loghs_scalar(seed),       concentration_value(seed), disintegration(seed), dual_symmetry(seed),
          laplacian_form(seed),     erm_recovery(seed)};
}

void write_selftest_csv(std::ostream& out, const std::vector<SelftestResult>& results, std::uint64_t seed) {
  io::write_run_header(out, "selftest", seed);
  out << "property,status,statistic\n";
  for (const auto& r : results) out << r.name << ',' << (r.pass ? "pass" : "fail") << ',' << r.statistic << '\n';
}

}  // namespace geoml::cli
