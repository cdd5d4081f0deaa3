#include <gtest/gtest.h>

#include "geoml/markov.hpp"
#include "geoml/random.hpp"

namespace {

using geoml::Matrix;
using geoml::Vector;
namespace mk = geoml::markov;

const mk::FiniteSpace ab({"a", "b"});

mk::MarkovKernel kernel2(const Matrix& rows) { return mk::MarkovKernel(ab, ab, rows); }

Matrix random_stochastic(std::size_t p, std::size_t q, geoml::Rng& rng) {
  Matrix m(p, q);
  for (std::size_t i = 0; i < p; ++i) m.row(i) = rng.dirichlet(static_cast<Eigen::Index>(q)).transpose();
  return m;
}

mk::JointMeasure random_joint(std::size_t p, std::size_t q, geoml::Rng& rng) {
  Matrix t(p, q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) t(i, j) = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
  if (t.sum() == 0.0) t(0, 0) = 1.0;
  t /= t.sum();
  return mk::JointMeasure(mk::FiniteSpace::indexed(p), mk::FiniteSpace::indexed(q), t);
}

TEST(FiniteSpace, LabelsAndProduct) {
  EXPECT_EQ(ab.index_of("b"), 1u);
  EXPECT_THROW(ab.index_of("c"), geoml::ValidationError);
  EXPECT_THROW(mk::FiniteSpace({"a", "a"}), geoml::ValidationError);
  const auto p = mk::product(ab, mk::FiniteSpace({"u", "v", "w"}));
  EXPECT_EQ(p.size(), 6u);
  EXPECT_EQ(p.label(1), "(a;v)");
}

TEST(Validation, RejectsBadRowsAndMeasures) {
  EXPECT_THROW(kernel2(Matrix{{0.5, 0.6}, {0, 1}}), geoml::ValidationError);
  EXPECT_THROW(kernel2(Matrix{{1.5, -0.5}, {0, 1}}), geoml::ValidationError);
  EXPECT_THROW(mk::ProbVector(ab, Vector{{0.3, 0.3}}), geoml::ValidationError);
  EXPECT_THROW(mk::JointMeasure(ab, ab, Matrix{{0.5, 0.5}, {0.5, 0.5}}), geoml::ValidationError);
}

TEST(Dirac, Examples) {
  const auto d = mk::dirac(ab, "a");
  EXPECT_EQ(d.weights(), (Vector{{1, 0}}));
  const auto t = kernel2(Matrix{{0.3, 0.7}, {0.9, 0.1}});
  EXPECT_EQ(mk::pushforward(t, d).weights(), t.rows().row(0).transpose());
  EXPECT_EQ(mk::pushforward(mk::MarkovKernel::identity(ab), d).weights(), d.weights());
  EXPECT_THROW(mk::dirac(ab, "z"), geoml::ValidationError);
}

TEST(Compose, Examples) {
  const auto t = kernel2(Matrix{{0.5, 0.5}, {0, 1}});
  EXPECT_EQ(mk::compose(t, mk::MarkovKernel::identity(ab)).rows(), t.rows());
  EXPECT_TRUE(mk::compose(t, t).rows().isApprox(Matrix{{0.25, 0.75}, {0, 1}}, 1e-15));
  EXPECT_THROW(mk::compose(t, mk::MarkovKernel::identity(mk::FiniteSpace::indexed(3))), geoml::ValidationError);
}

TEST(Compose, Associative) {
  geoml::Rng rng(51);
  for (int i = 0; i < 50; ++i) {
    const auto s = [&](std::size_t n) { return mk::FiniteSpace::indexed(n); };
    const auto p = static_cast<std::size_t>(rng.integer(1, 5));
    const auto q = static_cast<std::size_t>(rng.integer(1, 5));
    const auto r = static_cast<std::size_t>(rng.integer(1, 5));
    const auto u = static_cast<std::size_t>(rng.integer(1, 5));
    const mk::MarkovKernel t1(s(p), s(q), random_stochastic(p, q, rng));
    const mk::MarkovKernel t2(s(q), s(r), random_stochastic(q, r, rng));
    const mk::MarkovKernel t3(s(r), s(u), random_stochastic(r, u, rng));
    const Matrix lhs = mk::compose(mk::compose(t1, t2), t3).rows();
    const Matrix rhs = mk::compose(t1, mk::compose(t2, t3)).rows();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Pushforward, ExamplesAndLinearity) {
  const auto t = kernel2(Matrix{{0.5, 0.5}, {0, 1}});
  const mk::ProbVector mu(ab, Vector{{1, 0}});
  EXPECT_EQ(mk::pushforward(t, mu).weights(), (Vector{{0.5, 0.5}}));
  const mk::SignedVector x(ab, Vector{{0.7, -2.0}});
  const mk::SignedVector y(ab, Vector{{1.5, 0.25}});
  const Vector lhs = mk::pushforward(t, x * 2.0 + y * -3.0).weights();
  const Vector rhs = (mk::pushforward(t, x) * 2.0 + mk::pushforward(t, y) * -3.0).weights();
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(mk::pushforward(t, x).tv_norm(), x.tv_norm() + 1e-15);
}

TEST(Join, Examples) {
  const auto d = kernel2(Matrix{{1, 0}, {0, 1}});
  EXPECT_EQ(mk::join(d, d).rows().row(1), (Eigen::RowVectorXd{{0, 0, 0, 1}}));
  const auto t1 = kernel2(Matrix{{0.5, 0.5}, {1, 0}});
  const auto t2 = kernel2(Matrix{{0.3, 0.7}, {0, 1}});
  const Matrix j = mk::join(t1, t2).rows();
  EXPECT_TRUE(j.row(0).isApprox(Eigen::RowVectorXd{{0.15, 0.35, 0.15, 0.35}}, 1e-15));
  // marginals recover the factors
  const auto first = mk::compose(mk::join(t1, t2), mk::projection_x(ab, ab));
  EXPECT_TRUE(first.rows().isApprox(t1.rows(), 1e-15));
}

TEST(Graph, Examples) {
  const Matrix g = mk::graph(mk::MarkovKernel::identity(ab)).rows();
  EXPECT_EQ(g.row(0), (Eigen::RowVectorXd{{1, 0, 0, 0}}));
  EXPECT_EQ(g.row(1), (Eigen::RowVectorXd{{0, 0, 0, 1}}));
  const auto t = kernel2(Matrix{{0.3, 0.7}, {0.5, 0.5}});
  EXPECT_TRUE(mk::graph(t).rows().row(0).isApprox(Eigen::RowVectorXd{{0.3, 0.7, 0, 0}}, 1e-15));
  const auto back = mk::compose(mk::graph(t), mk::projection_x(ab, ab));
  EXPECT_TRUE(back.rows().isApprox(Matrix::Identity(2, 2), 1e-15));
}

TEST(GraphPushforward, Examples) {
  const auto t = kernel2(Matrix{{0.5, 0.5}, {0.5, 0.5}});
  const mk::ProbVector mx(ab, Vector{{0.4, 0.6}});
  const auto mu = mk::graph_pushforward(t, mx);
  EXPECT_TRUE(mu.table().isApprox(Matrix{{0.2, 0.2}, {0.3, 0.3}}, 1e-15));
  EXPECT_TRUE(mk::marginal_x(mu).weights().isApprox(mx.weights(), 1e-15));
  const auto dirac_mu = mk::graph_pushforward(t, mk::dirac(ab, "b"));
  EXPECT_EQ(dirac_mu.table().row(0).sum(), 0.0);
  // agrees with pushing mu_X through the graph kernel
  EXPECT_TRUE(mk::pushforward(mk::graph(t), mx).weights().isApprox(mu.flattened().weights(), 1e-15));
}

TEST(Marginals, Examples) {
  const mk::JointMeasure mu(ab, ab, Matrix{{0.2, 0.2}, {0.3, 0.3}});
  EXPECT_TRUE(mk::marginal_x(mu).weights().isApprox(Vector{{0.4, 0.6}}, 1e-15));
  EXPECT_TRUE(mk::marginal_y(mu).weights().isApprox(Vector{{0.5, 0.5}}, 1e-15));
  const mk::ProbVector px(ab, Vector{{0.1, 0.9}});
  const mk::ProbVector py(mk::FiniteSpace::indexed(3), Vector{{0.2, 0.3, 0.5}});
  const auto prod = mk::product_measure(px, py);
  EXPECT_TRUE(mk::marginal_x(prod).weights().isApprox(px.weights(), 1e-15));
  EXPECT_TRUE(mk::marginal_y(prod).weights().isApprox(py.weights(), 1e-15));
}

TEST(Disintegrate, Examples) {
  const auto d = mk::disintegrate(mk::JointMeasure(ab, ab, Matrix{{0.2, 0.2}, {0.3, 0.3}}));
  EXPECT_TRUE(d.marginal.weights().isApprox(Vector{{0.4, 0.6}}, 1e-15));
  EXPECT_TRUE(d.kernel.rows().isApprox(Matrix::Constant(2, 2, 0.5), 1e-15));

  const auto z = mk::disintegrate(mk::JointMeasure(ab, ab, Matrix{{0.5, 0.5}, {0, 0}}));
  EXPECT_EQ(z.marginal.weights(), (Vector{{1, 0}}));
  EXPECT_EQ(z.kernel.rows().row(1), (Eigen::RowVectorXd{{0.5, 0.5}}));

  const mk::ProbVector nu(mk::FiniteSpace::indexed(3), Vector{{0.2, 0.3, 0.5}});
  const auto p = mk::disintegrate(mk::product_measure(mk::ProbVector(ab, Vector{{0.25, 0.75}}), nu));
  for (Eigen::Index x = 0; x < 2; ++x) EXPECT_TRUE(p.kernel.rows().row(x).transpose().isApprox(nu.weights(), 1e-15));
}

TEST(Disintegrate, RoundTripProperty) {
  geoml::Rng rng(52);
  for (int i = 0; i < 500; ++i) {
    const auto mu = random_joint(static_cast<std::size_t>(rng.integer(1, 6)),
                                 static_cast<std::size_t>(rng.integer(1, 6)), rng);
    const auto d = mk::disintegrate(mu);
    const auto back = mk::graph_pushforward(d.kernel, d.marginal);
    EXPECT_LE((back.table() - mu.table()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(mk::verify_conditional(d.kernel, mu, 1e-12));
  }
}

TEST(VerifyConditional, Examples) {
  const mk::FiniteSpace x3 = mk::FiniteSpace::indexed(3);
  const mk::JointMeasure mu(x3, ab, Matrix{{0.1, 0.3}, {0.6, 0.0}, {0.0, 0.0}});
  const auto d = mk::disintegrate(mu);
  EXPECT_TRUE(mk::verify_conditional(d.kernel, mu, 1e-12));

  Matrix on_support = d.kernel.rows();
  on_support.row(0) += Eigen::RowVectorXd{{0.1, -0.1}};
  EXPECT_FALSE(mk::verify_conditional(mk::MarkovKernel(x3, ab, on_support), mu, 1e-9));

  Matrix off_support = d.kernel.rows();
  off_support.row(2) = Eigen::RowVectorXd{{1.0, 0.0}};
  const mk::MarkovKernel t(x3, ab, off_support);
  EXPECT_TRUE(mk::verify_conditional(t, mu, 1e-12));
  EXPECT_TRUE(mk::ae_equal(t, d.kernel, d.marginal, 1e-12));
  EXPECT_TRUE(mk::ae_equal(t, t, d.marginal, 0.0));
  EXPECT_FALSE(mk::ae_equal(mk::MarkovKernel(x3, ab, on_support), d.kernel, d.marginal, 1e-9));
}

TEST(NoiseChannel, Examples) {
  const auto x = mk::FiniteSpace::indexed(2);
  const auto y = mk::FiniteSpace::indexed(7);
  const std::vector<std::size_t> f{3, 0};

  const auto det = mk::noise_channel(x, y, f, {0, Vector{{1.0}}});
  EXPECT_TRUE(det.rows().isApprox(mk::MarkovKernel::deterministic(x, y, f).rows()));

  const auto t = mk::noise_channel(x, y, f, {-1, Vector{{0.25, 0.5, 0.25}}});
  EXPECT_TRUE(t.rows().row(0).isApprox(Eigen::RowVectorXd{{0, 0, 0.25, 0.5, 0.25, 0, 0}}, 1e-15));
  // mass below the grid accumulates at index 0
  EXPECT_TRUE(t.rows().row(1).isApprox(Eigen::RowVectorXd{{0.75, 0.25, 0, 0, 0, 0, 0}}, 1e-15));

  const Vector yv = Vector::LinSpaced(7, 0.0, 6.0);
  const Vector r = mk::regression_function(mk::graph_pushforward(t, mk::ProbVector::uniform(x)), yv);
  EXPECT_NEAR(r(0), 3.0, 1e-14);
}

TEST(RegressionFunction, Examples) {
  const auto x = mk::FiniteSpace::indexed(3);
  const auto y = mk::FiniteSpace::indexed(4);
  const std::vector<std::size_t> g{2, 0, 3};
  const Vector yv{{-1.0, 0.5, 2.0, 4.0}};
  const auto mu = mk::graph_pushforward(mk::MarkovKernel::deterministic(x, y, g), mk::ProbVector::uniform(x));
  EXPECT_TRUE(mk::regression_function(mu, yv).isApprox(Vector{{2.0, -1.0, 4.0}}, 1e-15));

  const mk::JointMeasure half(ab, ab, Matrix{{0.25, 0.25}, {0.0, 0.5}});
  EXPECT_NEAR(mk::regression_function(half, Vector{{0, 1}})(0), 0.5, 1e-15);
  EXPECT_THROW(mk::regression_function(half, Vector{{0, 1, 2}}), geoml::ValidationError);
}

}  // namespace
