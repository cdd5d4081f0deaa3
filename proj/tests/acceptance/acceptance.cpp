// End-to-end acceptance run. One line per criterion:
//   AC<k> PASS|FAIL <name> <statistics> time=<seconds>
// Exit status is nonzero if any criterion fails.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "geoml/divergences.hpp"
#include "geoml/erm.hpp"
#include "geoml/kernels.hpp"
#include "geoml/laplacian.hpp"
#include "geoml/markov.hpp"
#include "geoml/rkhs.hpp"
#include "geoml/spd_geometry.hpp"

using namespace geoml;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Symmetric log through a fresh eigensolver, independent of the library's matfun.
Matrix oracle_logm(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() * es.eigenvectors().transpose();
}

Outcome ac1_geodesic_endpoints() {
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto n = rng.integer(2, 6);
    const auto a = random_spd(n, rng);
    const auto b = random_spd(n, rng);
    const double scale = a.matrix().norm();
    for (auto m : {spd::Metric::AffineInvariant, spd::Metric::BuresWasserstein, spd::Metric::LogEuclidean}) {
      const Matrix g0 = spd::geodesic(m, spd::GeodesicQuery(a, b, 0.0)).matrix();
      const Matrix g1 = spd::geodesic(m, spd::GeodesicQuery(a, b, 1.0)).matrix();
      worst = std::max(worst, (g0 - a.matrix()).norm() / scale);
      worst = std::max(worst, (g1 - b.matrix()).norm() / scale);
    }
  }
  return {worst <= 1e-10, "max_rel_endpoint_err=" + fmt("%.3e", worst)};
}

Outcome ac2_metric_axioms() {
  Rng rng(202);
  double sym = 0.0, tri = -1e300, self = 0.0, congr = 0.0;
  double min_pos = 1e300;
  for (int i = 0; i < 1000; ++i) {
    const auto n = rng.integer(2, 5);
    const auto a = random_spd(n, rng);
    const auto b = random_spd(n, rng);
    const auto c = random_spd(n, rng);
    for (auto m : {spd::Metric::AffineInvariant, spd::Metric::LogEuclidean, spd::Metric::BuresWasserstein}) {
      const double ab = spd::distance(m, a, b);
      const double ba = spd::distance(m, b, a);
      sym = std::max(sym, std::abs(ab - ba));
      self = std::max(self, spd::distance(m, a, a));
      min_pos = std::min(min_pos, ab);
      if (m != spd::Metric::BuresWasserstein) {
        tri = std::max(tri, spd::distance(m, a, c) - ab - spd::distance(m, b, c));
      }
    }
    const Matrix g = random_invertible(n, rng);
    const SpdMatrix ga(SymMatrix::symmetrized(g * a.matrix() * g.transpose()));
    const SpdMatrix gb(SymMatrix::symmetrized(g * b.matrix() * g.transpose()));
    const double d0 = spd::ai_distance(a, b);
    congr = std::max(congr, std::abs(spd::ai_distance(ga, gb) - d0) / std::max(1.0, d0));
  }
  const bool ok = sym <= 1e-8 && tri <= 1e-8 && self <= 1e-8 && min_pos > 0.0 && congr <= 1e-8;
  return {ok, "sym=" + fmt("%.2e", sym) + " tri_excess=" + fmt("%.2e", tri) + " d(A,A)=" + fmt("%.2e", self) +
                  " min_d=" + fmt("%.2e", min_pos) + " congruence=" + fmt("%.2e", congr)};
}

double relative_min_eig(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return top > 0.0 ? ev(0) / top : 0.0;
}

Outcome ac3_kernel_pd_sweep() {
  Rng rng(303);
  std::vector<kern::KernelSpec> specs;
  for (double c : {0.0, 1.0})
    for (int d : {1, 2, 3}) specs.emplace_back(kern::LogEPoly{c, d});
  for (int k = 0; k < 10; ++k) {
    const double sigma = std::pow(10.0, -1.0 + 2.0 * k / 9.0);
    for (double p : {0.5, 1.0, 2.0}) specs.emplace_back(kern::LogEExp{sigma, p});
  }
  double worst = 1.0;
  std::size_t grams = 0;
  for (int s = 0; s < 200; ++s) {
    const auto n = rng.integer(2, 5);
    const auto m = rng.integer(2, 25);
    std::vector<SpdMatrix> pts;
    for (std::int64_t j = 0; j < m; ++j) pts.push_back(random_spd(n, rng));
    for (const auto& spec : specs) {
      worst = std::min(worst, relative_min_eig(kern::gram(spec, pts).entries));
      ++grams;
    }
  }
  return {worst >= -1e-9, "grams=" + std::to_string(grams) + " min_rel_eig=" + fmt("%.3e", worst)};
}

Outcome ac4_stein() {
  const int n = 3;
  std::size_t violations = 0;
  double worst = 1.0;
  for (double sigma : {0.5, 1.0, 1.6}) {
    const kern::KernelSpec spec(kern::Stein{sigma});
    const auto sampler = kern::mixed_sampler(n);
    for (std::uint64_t i = 0; i < 200; ++i) {
      Rng rng = Rng::stream(404, i);
      const double r = relative_min_eig(kern::gram(spec, sampler(rng)).entries);
      worst = std::min(worst, r);
      if (r < -1e-9) ++violations;
    }
  }
  const kern::KernelSpec bad(kern::Stein{0.75});
  std::size_t budget = 100000;
  auto w = kern::nonpd_witness_search(bad, kern::mixed_sampler(n), budget, 405);
  std::string note;
  if (!w) {
    note = " inconclusive_first_budget";
    budget *= 2;
    w = kern::nonpd_witness_search(bad, kern::mixed_sampler(n), budget, 406);
  }
  const bool ok = violations == 0 && w.has_value() && w->min_eigenvalue < -1e-8;
  std::string detail = "admissible_violations=" + std::to_string(violations) + " min_rel_eig=" + fmt("%.2e", worst);
  detail += w ? " witness_trial=" + std::to_string(w->trial) + " witness_min_eig=" + fmt("%.3e", w->min_eigenvalue)
              : " no_witness";
  return {ok, detail + note};
}

// Decomposition RHS from explicit d x d covariance matrices.
double logdecomp_oracle(const Matrix& x1, const Matrix& x2, double g1, double g2) {
  auto cov = [](const Matrix& x) {
    const auto m = x.cols();
    const Matrix j = Matrix::Identity(m, m) - Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
    return Matrix(x * j * x.transpose() / static_cast<double>(m));
  };
  const auto d = x1.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix diff = oracle_logm(cov(x1) / g1 + id) - oracle_logm(cov(x2) / g2 + id);
  const double lg = std::log(g1 / g2);
  return std::sqrt(diff.squaredNorm() + lg * lg);
}

Outcome ac5_loghs_oracle() {
  Rng rng(505);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto m1 = rng.integer(2, 10);
    const auto m2 = rng.integer(2, 10);
    const auto d = m1 + m2 + 4;
    const Matrix x1 = rng.normal_matrix(d, m1);
    const Matrix x2 = rng.normal_matrix(d, m2) * rng.uniform(0.5, 2.0);
    const double g1 = std::pow(10.0, rng.uniform(-2.0, 0.0));
    const double g2 = std::pow(10.0, rng.uniform(-2.0, 0.0));
    const double got = rkhs::loghs_cov_distance({x1, x2, g1, g2, kern::KernelSpec(kern::Linear{})});
    const double want = logdecomp_oracle(x1, x2, g1, g2);
    worst = std::max(worst, std::abs(got - want) / want);
  }
  return {worst <= 1e-8, "max_rel_err=" + fmt("%.3e", worst)};
}

Outcome ac6_scalar_identity() {
  Rng rng(606);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double g1 = std::exp(rng.uniform(-4.0, 4.0));
    const double g2 = std::exp(rng.uniform(-4.0, 4.0));
    const Matrix x1 = rng.normal_matrix(4, 1);
    const Matrix x2 = rng.normal_matrix(4, 1);
    const double got = rkhs::loghs_cov_distance({x1, x2, g1, g2, kern::KernelSpec(kern::EuclideanGaussian{1.0})});
    worst = std::max(worst, std::abs(got - std::abs(std::log(g1 / g2))));
  }
  return {worst <= 1e-12, "max_abs_err=" + fmt("%.3e", worst)};
}

Outcome ac7_concentration() {
  Matrix support(2, 5);
  support << 0.0, 1.0, 0.0, 1.0, 0.5,
             0.0, 0.0, 1.0, 1.0, 0.5;
  const rkhs::PointSampler mu = [support](Rng& rng) {
    return Vector(support.col(rng.integer(0, 4)));
  };
  const kern::KernelSpec spec(kern::EuclideanGaussian{0.5});
  const auto rep = rkhs::concentration_montecarlo(spec, mu, 100, 0.1, 2000, 707);
  return {rep.failure_rate <= 0.105, "failure_rate=" + fmt("%.4f", rep.failure_rate) + " bound=" +
                                         fmt("%.6f", rep.bound) + " mean_mmd=" + fmt("%.4f", rep.mean_mmd) +
                                         " kbar=" + fmt("%.3f", rep.kbar)};
}

markov::JointMeasure random_joint(Rng& rng) {
  const auto p = static_cast<std::size_t>(rng.integer(1, 6));
  const auto q = static_cast<std::size_t>(rng.integer(1, 6));
  Matrix t(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
  for (Eigen::Index x = 0; x < t.rows(); ++x) {
    const bool empty_row = p > 1 && rng.uniform() < 0.2;
    for (Eigen::Index y = 0; y < t.cols(); ++y) {
      t(x, y) = (empty_row || rng.uniform() < 0.2) ? 0.0 : rng.uniform(0.05, 1.0);
    }
  }
  if (t.sum() == 0.0) t(0, 0) = 1.0;
  t /= t.sum();
  return markov::JointMeasure(markov::FiniteSpace::indexed(p), markov::FiniteSpace::indexed(q), t);
}

Outcome ac8_disintegration() {
  Rng rng(808);
  double roundtrip = 0.0, loss_at_cond = 0.0, min_perturbed = 1e300;
  std::size_t perturbations = 0;
  for (int i = 0; i < 500; ++i) {
    const auto mu = random_joint(rng);
    const auto d = markov::disintegrate(mu);
    const auto back = markov::graph_pushforward(d.kernel, d.marginal);
    roundtrip = std::max(roundtrip, (back.table() - mu.table()).cwiseAbs().maxCoeff());
    const auto p = mu.xspace().size();
    const auto q = mu.yspace().size();
    const auto embed = rkhs::ProductEmbedding::simplex(p, q);
    const kern::KernelSpec spec(kern::EuclideanGaussian{1.0});
    loss_at_cond = std::max(loss_at_cond, rkhs::correct_loss(spec, d.kernel, mu, embed));
    for (std::size_t x = 0; x < p; ++x) {
      if (d.marginal[x] <= 0.0) continue;
      for (std::size_t y = 0; y < q; ++y) {
        Matrix rows = d.kernel.rows();
        Vector target = Vector::Zero(static_cast<Eigen::Index>(q));
        target(static_cast<Eigen::Index>(y)) = 1.0;
        if ((rows.row(static_cast<Eigen::Index>(x)).transpose() - target).cwiseAbs().maxCoeff() == 0.0) continue;
        rows.row(static_cast<Eigen::Index>(x)) = 0.9 * rows.row(static_cast<Eigen::Index>(x)) + 0.1 * target.transpose();
        const markov::MarkovKernel h(mu.xspace(), mu.yspace(), rows);
        min_perturbed = std::min(min_perturbed, rkhs::correct_loss(spec, h, mu, embed));
        ++perturbations;
      }
    }
  }
  const bool ok = roundtrip <= 1e-12 && loss_at_cond <= 1e-10 && min_perturbed > 1e-6;
  return {ok, "roundtrip=" + fmt("%.2e", roundtrip) + " loss_at_conditional=" + fmt("%.2e", loss_at_cond) +
                  " perturbations=" + std::to_string(perturbations) + " min_perturbed_loss=" + fmt("%.3e", min_perturbed)};
}

Outcome ac9_alpha_logdet() {
  Rng rng(909);
  double dual = 0.0, cont = 0.0, fan = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = rng.integer(2, 6);
    const auto a = random_spd(n, rng);
    const auto b = random_spd(n, rng);
    const div::AlphaParam al(rng.uniform(-1.0, 1.0));
    dual = std::max(dual, div::check_dual_symmetry(al, a, b));
    for (double sgn : {1.0, -1.0}) {
      const double lim = div::alpha_logdet(div::AlphaParam(sgn), a, b);
      const double near = div::alpha_logdet(div::AlphaParam(sgn * (1.0 - 1e-5)), a, b);
      cont = std::max(cont, std::abs(near - lim) / std::max(1.0, lim));
    }
    fan = std::min(fan, div::fan_gap(rng.uniform(), a, b));
  }
  const bool ok = dual <= 1e-10 && cont <= 1e-3 && fan >= -1e-12;
  return {ok, "dual_residual=" + fmt("%.2e", dual) + " limit_gap=" + fmt("%.2e", cont) +
                  " min_fan_gap=" + fmt("%.2e", fan)};
}

Outcome ac10_belkin_niyogi() {
  const auto rows = lap::convergence_sweep(lap::Manifold::Circle, "cos", lap::default_base_point(lap::Manifold::Circle),
                                           {500, 2000, 8000}, 20, 1.0, 1010);
  bool mono = true;
  std::string detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].median_relative_error > rows[i - 1].median_relative_error) mono = false;
    detail += "m" + std::to_string(rows[i].m) + "=" + fmt("%.4f", rows[i].median_relative_error) + " ";
  }
  return {mono && rows.back().median_relative_error <= 0.15, detail + (mono ? "non-increasing" : "increasing")};
}

Outcome ac11_erm_curve() {
  const auto model = erm::GridModel::uniform(5, 5);
  const auto mu = erm::gaussian_bump_joint(model);
  const std::vector<std::size_t> sizes{50, 200, 800};
  const auto schedule = erm::Schedule::power(sizes, 1.0 / 3.0);
  int good = 0;
  std::string detail;
  for (int rep = 0; rep < 5; ++rep) {
    erm::ErmOptions opts;
    opts.seed = 1100 + static_cast<std::uint64_t>(rep);
    const auto rows = erm::learning_curve(model, mu, sizes, schedule, 10, 0.5, opts);
    bool mono = true;
    for (std::size_t i = 1; i < rows.size(); ++i) mono = mono && rows[i].median_dM <= rows[i - 1].median_dM;
    good += mono;
    detail += "[";
    for (const auto& r : rows) detail += fmt("%.4f", r.median_dM) + (&r == &rows.back() ? "" : ",");
    detail += "]";
  }
  return {good >= 4, "non_increasing_runs=" + std::to_string(good) + "/5 medians=" + detail};
}

Outcome ac12_determinism() {
  auto once = [] {
    std::ostringstream out, err;
    const int code = cli::run({"geoml", "selftest", "--seed", "12"}, out, err);
    return std::make_pair(code, out.str());
  };
  const auto a = once();
  const auto b = once();
  const bool ok = a.second == b.second && !a.second.empty() && a.first == 0;
  return {ok, std::string(a.second == b.second ? "byte-identical" : "outputs differ") + " bytes=" +
                  std::to_string(a.second.size()) + " selftest_exit=" + std::to_string(a.first)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"geodesic_endpoints", 5, ac1_geodesic_endpoints},
      {"metric_axioms", 30, ac2_metric_axioms},
      {"loge_kernel_pd_sweep", 60, ac3_kernel_pd_sweep},
      {"stein_kernel_both_directions", 600, ac4_stein},
      {"loghs_linear_oracle", 30, ac5_loghs_oracle},
      {"loghs_scalar_identity", 30, ac6_scalar_identity},
      {"mmd_concentration_bound", 120, ac7_concentration},
      {"disintegration_characterization", 10, ac8_disintegration},
      {"alpha_logdet", 10, ac9_alpha_logdet},
      {"belkin_niyogi_convergence", 300, ac10_belkin_niyogi},
      {"erm_learning_curve", 600, ac11_erm_curve},
      {"selftest_determinism", 120, ac12_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < criteria[i].limit_seconds;
    failures += !pass;
    std::printf("AC%zu %s %s %s time=%.2fs%s\n", i + 1, pass ? "PASS" : "FAIL", criteria[i].name, o.detail.c_str(),
                secs, secs < criteria[i].limit_seconds ? "" : " (over time limit)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
