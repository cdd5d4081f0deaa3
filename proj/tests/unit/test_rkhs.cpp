#include <cmath>

#include <gtest/gtest.h>

#include "geoml/rkhs.hpp"

namespace {

using geoml::Matrix;
using geoml::Vector;
namespace kern = geoml::kern;
namespace mk = geoml::markov;
namespace rkhs = geoml::rkhs;

const kern::KernelSpec gauss(kern::EuclideanGaussian{1.0});
const kern::KernelSpec linear(kern::Linear{});

Matrix logm_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() * es.eigenvectors().transpose();
}

// (1/m) X J X^T computed in the ambient space.
Matrix covariance(const Matrix& x) {
  const Matrix c = x.colwise() - x.rowwise().mean();
  return c * c.transpose() / static_cast<double>(x.cols());
}

double direct_loghs(const Matrix& x1, const Matrix& x2, double g1, double g2) {
  const auto d = x1.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix diff = logm_sym(covariance(x1) / g1 + id) - logm_sym(covariance(x2) / g2 + id);
  return std::sqrt(diff.squaredNorm() + std::pow(std::log(g1 / g2), 2));
}

TEST(Mmd, Examples) {
  geoml::Rng rng(71);
  const rkhs::Sample s(rng.normal_matrix(3, 7));
  EXPECT_EQ(rkhs::mmd(gauss, s, s), 0.0);

  const double gamma = 0.7;
  const Vector x{{0.5, -1.0}};
  const Vector y{{1.5, 0.25}};
  const kern::KernelSpec kg(kern::EuclideanGaussian{kern::sigma_from_gamma(gamma)});
  EXPECT_NEAR(rkhs::mmd(kg, rkhs::Sample(x), rkhs::Sample(y)),
              std::sqrt(2 - 2 * std::exp(-gamma * (x - y).squaredNorm())), 1e-14);

  const Matrix a = rng.normal_matrix(4, 6);
  const Matrix b = rng.normal_matrix(4, 9);
  EXPECT_NEAR(rkhs::mmd(linear, rkhs::Sample(a), rkhs::Sample(b)),
              (a.rowwise().mean() - b.rowwise().mean()).norm(), 1e-12);
}

TEST(Mmd, WeightedAndValidation) {
  const Matrix p{{0.0, 1.0, 2.0}};
  const rkhs::Sample w(p, Vector{{0.5, 0.0, 0.5}});
  const rkhs::Sample u(Matrix{{0.0, 2.0}});
  EXPECT_NEAR(rkhs::mmd(gauss, w, u), 0.0, 1e-7);
  EXPECT_THROW(rkhs::Sample(Matrix(2, 0)), geoml::ValidationError);
  EXPECT_THROW(rkhs::Sample(p, Vector{{0.5, 0.5}}), geoml::ValidationError);
}

TEST(Mmd, Pseudometric) {
  geoml::Rng rng(72);
  for (int i = 0; i < 200; ++i) {
    const rkhs::Sample a(rng.normal_matrix(2, rng.integer(1, 8)));
    const rkhs::Sample b(rng.normal_matrix(2, rng.integer(1, 8)));
    const rkhs::Sample c(rng.normal_matrix(2, rng.integer(1, 8)));
    EXPECT_EQ(rkhs::mmd(gauss, a, b), rkhs::mmd(gauss, b, a));
    EXPECT_LE(rkhs::mmd(gauss, a, c), rkhs::mmd(gauss, a, b) + rkhs::mmd(gauss, b, c) + 1e-9);
  }
}

TEST(SignedEmbedding, Examples) {
  const Matrix pts{{0.0, 2.0}};
  EXPECT_EQ(rkhs::signed_embedding_norm(gauss, pts, Vector::Zero(2)), 0.0);
  EXPECT_NEAR(rkhs::signed_embedding_norm(gauss, pts, Vector{{1, -1}}), std::sqrt(2 - 2 * std::exp(-4.0)), 1e-14);
  EXPECT_NEAR(rkhs::signed_embedding_norm(gauss, Matrix{{0.0, 0.0}}, Vector{{1, -1}}), 0.0, 1e-7);
}

TEST(ConcentrationBound, Examples) {
  EXPECT_NEAR(rkhs::concentration_bound(100, 0.1, 1.0), 0.2 + std::sqrt(2 * std::log(10.0) / 100), 1e-15);
  EXPECT_NEAR(rkhs::concentration_bound(100, 0.1, 1.0), 0.414599, 5e-6);
  EXPECT_NEAR(rkhs::concentration_bound(50, 1 - 1e-15, 0.8), 2 * std::sqrt(0.8 / 50), 1e-8);
  const double first = 2 * std::sqrt(1.0 / 100);
  const double first4 = rkhs::concentration_bound(400, 0.3, 1.0) - std::sqrt(2 * std::log(1 / 0.3) / 400);
  EXPECT_NEAR(first4, first / 2, 1e-15);
  EXPECT_THROW(rkhs::concentration_bound(100, 1.0, 1.0), geoml::ValidationError);
  EXPECT_THROW(rkhs::concentration_bound(0, 0.5, 1.0), geoml::ValidationError);
}

TEST(ConcentrationMonteCarlo, PointMassAndUniform) {
  const auto point = [](geoml::Rng&) { return Vector{{0.3, 0.3}}; };
  EXPECT_EQ(rkhs::concentration_montecarlo(gauss, point, 20, 0.1, 50, 1).failure_rate, 0.0);

  Matrix five(2, 5);
  five << 0, 1, 0, -1, 0.5, 0, 0, 1, 0, -0.5;
  const auto uniform5 = [&](geoml::Rng& r) { return Vector(five.col(r.integer(0, 4))); };
  for (double eps : {0.1, 0.5}) {
    const auto rep = rkhs::concentration_montecarlo(kern::KernelSpec(kern::EuclideanGaussian{0.5}), uniform5, 100,
                                                    eps, 200, 9);
    EXPECT_LE(rep.failure_rate, eps);
    EXPECT_NEAR(rep.kbar, 1.0, 1e-15);
    EXPECT_EQ(rep.reference_size, 5000u);
  }
}

TEST(CorrectLoss, ZeroAtDisintegrationAndSingleRow) {
  const auto x = mk::FiniteSpace::indexed(3);
  const auto y = mk::FiniteSpace::indexed(3);
  const auto embed = rkhs::ProductEmbedding::simplex(3, 3);
  const mk::JointMeasure mu(x, y, Matrix{{0.1, 0.2, 0.0}, {0.0, 0.3, 0.1}, {0.2, 0.0, 0.1}});
  const auto d = mk::disintegrate(mu);
  EXPECT_LE(rkhs::correct_loss(gauss, d.kernel, mu, embed), 1e-7);

  // point mass at x = 1: loss equals the mmd between the two conditional rows
  const mk::JointMeasure pm(x, y, Matrix{{0, 0, 0}, {0.25, 0.5, 0.25}, {0, 0, 0}});
  Matrix rows = Matrix::Constant(3, 3, 1.0 / 3);
  rows.row(1) = Eigen::RowVectorXd{{0.6, 0.1, 0.3}};
  const mk::MarkovKernel h(x, y, rows);
  Matrix pts(6, 3);
  for (Eigen::Index j = 0; j < 3; ++j) pts.col(j) = embed.x_coords.col(1) + embed.y_coords.col(j);
  const double want = rkhs::mmd(gauss, rkhs::Sample(pts, Vector{{0.6, 0.1, 0.3}}),
                                rkhs::Sample(pts, Vector{{0.25, 0.5, 0.25}}));
  EXPECT_NEAR(rkhs::correct_loss(gauss, h, pm, embed), want, 1e-12);
}

TEST(CorrectLoss, ZeroIffConditional) {
  geoml::Rng rng(73);
  const auto s3 = mk::FiniteSpace::indexed(3);
  const auto embed = rkhs::ProductEmbedding::simplex(3, 3);
  for (int i = 0; i < 2000; ++i) {
    Matrix t(3, 3);
    for (Eigen::Index a = 0; a < 3; ++a) {
      const bool empty_row = rng.uniform() < 0.25;
      for (Eigen::Index b = 0; b < 3; ++b) t(a, b) = empty_row ? 0.0 : rng.uniform(0.05, 1.0);
    }
    if (t.sum() == 0.0) t(0, 0) = 1.0;
    t /= t.sum();
    const mk::JointMeasure mu(s3, s3, t);
    const auto d = mk::disintegrate(mu);
    Matrix rows = d.kernel.rows();
    const auto r = static_cast<Eigen::Index>(rng.integer(0, 2));
    if (i % 2 == 1) {
      Eigen::RowVectorXd target = Eigen::RowVectorXd::Zero(3);
      target(rng.integer(0, 2)) = 1.0;
      rows.row(r) = 0.9 * rows.row(r) + 0.1 * target;
    }
    const mk::MarkovKernel h(s3, s3, rows);
    const bool cond = mk::verify_conditional(h, mu, 1e-9);
    const double loss = rkhs::correct_loss(gauss, h, mu, embed);
    if (cond) {
      EXPECT_LE(loss, 1e-7);
    } else {
      EXPECT_GT(loss, 1e-6);
    }
  }
}

TEST(CovBlocks, Examples) {
  geoml::Rng rng(74);
  const rkhs::RegularizedCovariancePair single{rng.normal_matrix(3, 1), rng.normal_matrix(3, 1), 0.5, 2.0, gauss};
  const auto z = rkhs::cov_gram_blocks(single);
  EXPECT_EQ(z.aa.norm() + z.bb.norm() + z.ab.norm() + z.ba.norm(), 0.0);

  const Matrix x = rng.normal_matrix(2, 4);
  const auto same = rkhs::cov_gram_blocks({x, x, 0.3, 0.3, gauss});
  EXPECT_LT((same.aa - same.bb).norm(), 1e-15);
  EXPECT_LT((same.aa - same.ab).norm(), 1e-14);

  // m = 2 by hand: J = [[1,-1],[-1,1]]/2, J K J = (k11 - 2 k12 + k22)/4 * [[1,-1],[-1,1]]
  const Matrix x2{{0.0, 1.0}, {0.0, 0.5}};
  const double k12 = std::exp(-1.25);
  const double c = (2 - 2 * k12) / 4;
  const auto b2 = rkhs::cov_gram_blocks({x2, x2, 0.4, 0.4, gauss});
  EXPECT_NEAR(b2.aa(0, 0), c / (2 * 0.4), 1e-15);
  EXPECT_NEAR(b2.aa(0, 1), -c / (2 * 0.4), 1e-15);
  EXPECT_LE(rkhs::centering(3).rowwise().sum().norm(), 1e-15);
  EXPECT_EQ(rkhs::centering(1).norm(), 0.0);
}

TEST(LogRatio, RemovableSingularity) {
  EXPECT_EQ(rkhs::log_ratio(0.0), 1.0);
  EXPECT_NEAR(rkhs::log_ratio(1e-12), 1.0, 1e-12);
  EXPECT_NEAR(rkhs::log_ratio(1.0), std::log(2.0), 1e-15);
}

TEST(LogHs, ScalarOperators) {
  geoml::Rng rng(75);
  const rkhs::RegularizedCovariancePair p{rng.normal_matrix(2, 1), rng.normal_matrix(2, 1), 0.2, 3.0, gauss};
  EXPECT_NEAR(rkhs::loghs_cov_distance(p), std::abs(std::log(0.2 / 3.0)), 1e-15);
  EXPECT_NEAR(rkhs::loghs_cov_inner(p), std::log(0.2) * std::log(3.0), 1e-15);
  const Matrix x = rng.normal_matrix(3, 5);
  EXPECT_NEAR(rkhs::loghs_cov_distance({x, x, 0.5, 0.5, gauss}), 0.0, 1e-7);
}

TEST(LogHs, LinearKernelOracle) {
  geoml::Rng rng(76);
  for (int i = 0; i < 50; ++i) {
    const auto m1 = rng.integer(1, 4);
    const auto m2 = rng.integer(1, 4);
    const auto d = m1 + m2 + rng.integer(0, 2);
    const Matrix x1 = rng.normal_matrix(d, m1);
    const Matrix x2 = rng.normal_matrix(d, m2);
    const double g1 = std::exp(rng.uniform(-2, 1));
    const double g2 = std::exp(rng.uniform(-2, 1));
    const double want = direct_loghs(x1, x2, g1, g2);
    EXPECT_NEAR(rkhs::loghs_cov_distance({x1, x2, g1, g2, linear}), want, 1e-8 * std::max(1.0, want));
  }
}

TEST(LogHs, InnerPolarizationAndMetricAxioms) {
  geoml::Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    const Matrix a = rng.normal_matrix(2, rng.integer(1, 5));
    const Matrix b = rng.normal_matrix(2, rng.integer(1, 5));
    const Matrix c = rng.normal_matrix(2, rng.integer(1, 5));
    const double ga = std::exp(rng.uniform(-2, 1));
    const double gb = std::exp(rng.uniform(-2, 1));
    const double gc = std::exp(rng.uniform(-2, 1));
    const double uu = rkhs::loghs_cov_inner({a, a, ga, ga, gauss});
    const double vv = rkhs::loghs_cov_inner({b, b, gb, gb, gauss});
    const double uv = rkhs::loghs_cov_inner({a, b, ga, gb, gauss});
    const double dab = rkhs::loghs_cov_distance({a, b, ga, gb, gauss});
    EXPECT_NEAR(dab * dab, uu - 2 * uv + vv, 1e-9 * (1 + uu + vv));
    EXPECT_EQ(dab, rkhs::loghs_cov_distance({b, a, gb, ga, gauss}));
    const double dbc = rkhs::loghs_cov_distance({b, c, gb, gc, gauss});
    const double dac = rkhs::loghs_cov_distance({a, c, ga, gc, gauss});
    EXPECT_LE(dac, dab + dbc + 1e-8);
  }
}

TEST(LogHs, PermutationInvariant) {
  geoml::Rng rng(78);
  const Matrix a = rng.normal_matrix(3, 6);
  const Matrix b = rng.normal_matrix(3, 4);
  Matrix ap = a;
  ap.col(0).swap(ap.col(5));
  ap.col(1).swap(ap.col(3));
  EXPECT_NEAR(rkhs::loghs_cov_distance({a, b, 0.3, 0.7, gauss}), rkhs::loghs_cov_distance({ap, b, 0.3, 0.7, gauss}),
              1e-12);
}

TEST(LogHs, Validation) {
  const Matrix a = Matrix::Ones(2, 3);
  EXPECT_THROW(rkhs::loghs_cov_distance({a, a, 0.0, 1.0, gauss}), geoml::ValidationError);
  EXPECT_THROW(rkhs::loghs_cov_distance({a, Matrix::Ones(3, 3), 1.0, 1.0, gauss}), geoml::ValidationError);
  EXPECT_THROW(rkhs::loghs_cov_distance({a, a, 1.0, 1.0, kern::KernelSpec(kern::Stein{1.0})}), geoml::ValidationError);
}

TEST(TwoLayer, Examples) {
  geoml::Rng rng(79);
  std::vector<Matrix> sets;
  for (int i = 0; i < 10; ++i) sets.push_back(rng.normal_matrix(2, rng.integer(2, 6)) * rng.uniform(0.3, 2.0));
  sets.push_back(sets[0]);
  const Matrix d = rkhs::two_layer_distance_matrix(sets, gauss, 0.1);
  EXPECT_NEAR(d(0, 10), 0.0, 1e-7);
  EXPECT_NEAR(d(2, 5), rkhs::loghs_cov_distance({sets[2], sets[5], 0.1, 0.1, gauss}), 1e-15);
  EXPECT_EQ(d, d.transpose());
  const Matrix k2 = rkhs::two_layer_kernel(d, 1.5);
  EXPECT_NEAR(k2(0, 10), 1.0, 1e-12);
  EXPECT_GE(kern::min_eigenvalue(k2), -1e-9 * k2.norm());
}

TEST(Classify, Examples) {
  const std::vector<double> d{0.3, 0.0, 0.7};
  const std::vector<int> labels{4, 9, 2};
  EXPECT_EQ(rkhs::classify_1nn(d, labels), 9);
  const std::vector<double> equal{1.0, 1.0, 1.0};
  EXPECT_EQ(rkhs::classify_1nn(equal, labels), 4);
  EXPECT_THROW(rkhs::classify_1nn(std::vector<double>{}, std::vector<int>{}), geoml::ValidationError);
}

TEST(Classify, ScalarCovarianceClusters) {
  // scalar operators gamma I with small vs large gamma
  geoml::Rng rng(80);
  std::vector<Matrix> sets;
  std::vector<int> labels;
  std::vector<double> gammas;
  for (int i = 0; i < 6; ++i) {
    sets.push_back(rng.normal_matrix(2, 1));
    gammas.push_back(i < 3 ? rng.uniform(0.01, 0.02) : rng.uniform(50.0, 60.0));
    labels.push_back(i < 3 ? 0 : 1);
  }
  for (double gq : {0.015, 55.0}) {
    std::vector<double> dist;
    for (std::size_t j = 0; j < sets.size(); ++j)
      dist.push_back(rkhs::loghs_cov_distance({rng.normal_matrix(2, 1), sets[j], gq, gammas[j], gauss}));
    EXPECT_EQ(rkhs::classify_1nn(dist, labels), gq < 1 ? 0 : 1);
  }
}

}  // namespace
