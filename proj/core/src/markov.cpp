#include "geoml/markov.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace geoml::markov {

namespace {

void require_space(const FiniteSpace& a, const FiniteSpace& b, const char* what) {
  if (!(a == b)) throw ValidationError(std::string(what) + ": space mismatch");
}

void check_probability(const Vector& w, const char* what) {
  if (!w.allFinite()) throw ValidationError(std::string(what) + ": non-finite weight");
  if (w.size() > 0 && w.minCoeff() < 0.0) {
    throw ValidationError(std::string(what) + ": negative weight");
  }
  if (std::abs(w.sum() - 1.0) > kMassTol) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": weights sum to " << w.sum() << ", expected 1";
    throw ValidationError(os.str());
  }
}

}  // namespace

FiniteSpace::FiniteSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("finite space must have at least one point");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw ValidationError("finite space labels must be distinct");
}

FiniteSpace FiniteSpace::indexed(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return FiniteSpace(std::move(labels));
}

std::size_t FiniteSpace::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw ValidationError("unknown label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

FiniteSpace product(const FiniteSpace& x, const FiniteSpace& y) {
  std::vector<std::string> labels;
  labels.reserve(x.size() * y.size());
  for (const auto& a : x.labels())
    for (const auto& b : y.labels()) labels.push_back("(" + a + ";" + b + ")");
  return FiniteSpace(std::move(labels));
}

SignedVector::SignedVector(FiniteSpace space, Vector weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (static_cast<std::size_t>(weights_.size()) != space_.size()) {
    throw ValidationError("signed vector: length does not match space");
  }
  if (!weights_.allFinite()) throw ValidationError("signed vector: non-finite weight");
}

SignedVector SignedVector::operator+(const SignedVector& o) const {
  require_space(space_, o.space_, "signed vector +");
  return SignedVector(space_, weights_ + o.weights_);
}

SignedVector SignedVector::operator-(const SignedVector& o) const {
  require_space(space_, o.space_, "signed vector -");
  return SignedVector(space_, weights_ - o.weights_);
}

SignedVector SignedVector::operator*(double s) const { return SignedVector(space_, weights_ * s); }

ProbVector::ProbVector(FiniteSpace space, Vector weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (static_cast<std::size_t>(weights_.size()) != space_.size()) {
    throw ValidationError("probability vector: length does not match space");
  }
  check_probability(weights_, "probability vector");
}

ProbVector ProbVector::uniform(const FiniteSpace& space) {
  return ProbVector(space,
                    Vector::Constant(static_cast<Eigen::Index>(space.size()),
                                     1.0 / static_cast<double>(space.size())));
}

MarkovKernel::MarkovKernel(FiniteSpace source, FiniteSpace target, Matrix rows)
    : source_(std::move(source)), target_(std::move(target)), rows_(std::move(rows)) {
  if (static_cast<std::size_t>(rows_.rows()) != source_.size() ||
      static_cast<std::size_t>(rows_.cols()) != target_.size()) {
    throw ValidationError("markov kernel: shape does not match spaces");
  }
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    check_probability(rows_.row(i).transpose(), "markov kernel row");
  }
}

MarkovKernel MarkovKernel::identity(const FiniteSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.size());
  return MarkovKernel(space, space, Matrix::Identity(n, n));
}

MarkovKernel MarkovKernel::deterministic(const FiniteSpace& source, const FiniteSpace& target,
                                         std::span<const std::size_t> image) {
  if (image.size() != source.size()) throw ValidationError("deterministic kernel: image size");
  Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(source.size()),
                             static_cast<Eigen::Index>(target.size()));
  for (std::size_t x = 0; x < image.size(); ++x) {
    if (image[x] >= target.size()) throw ValidationError("deterministic kernel: image out of range");
    rows(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(image[x])) = 1.0;
  }
  return MarkovKernel(source, target, std::move(rows));
}

ProbVector MarkovKernel::row(std::size_t x) const {
  return ProbVector(target_, rows_.row(static_cast<Eigen::Index>(x)).transpose());
}

JointMeasure::JointMeasure(FiniteSpace xspace, FiniteSpace yspace, Matrix table)
    : xspace_(std::move(xspace)), yspace_(std::move(yspace)), table_(std::move(table)) {
  if (static_cast<std::size_t>(table_.rows()) != xspace_.size() ||
      static_cast<std::size_t>(table_.cols()) != yspace_.size()) {
    throw ValidationError("joint measure: shape does not match spaces");
  }
  if (!table_.allFinite()) throw ValidationError("joint measure: non-finite entry");
  if (table_.minCoeff() < 0.0) throw ValidationError("joint measure: negative entry");
  if (std::abs(table_.sum() - 1.0) > kMassTol) {
    throw ValidationError("joint measure: total mass differs from 1");
  }
}

ProbVector JointMeasure::flattened() const {
  Vector w(table_.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < table_.rows(); ++i)
    for (Eigen::Index j = 0; j < table_.cols(); ++j) w(k++) = table_(i, j);
  return ProbVector(product(xspace_, yspace_), std::move(w));
}

ProbVector dirac(const FiniteSpace& space, const std::string& label) {
  return dirac(space, space.index_of(label));
}

ProbVector dirac(const FiniteSpace& space, std::size_t index) {
  if (index >= space.size()) throw ValidationError("dirac: index out of range");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(space.size()));
  w(static_cast<Eigen::Index>(index)) = 1.0;
  return ProbVector(space, std::move(w));
}

MarkovKernel compose(const MarkovKernel& t1, const MarkovKernel& t2) {
  require_space(t1.target(), t2.source(), "compose");
  return MarkovKernel(t1.source(), t2.target(), t1.rows() * t2.rows());
}

SignedVector pushforward(const MarkovKernel& t, const SignedVector& mu) {
  require_space(t.source(), mu.space(), "pushforward");
  return SignedVector(t.target(), t.rows().transpose() * mu.weights());
}

ProbVector pushforward(const MarkovKernel& t, const ProbVector& mu) {
  require_space(t.source(), mu.space(), "pushforward");
  return ProbVector(t.target(), t.rows().transpose() * mu.weights());
}

MarkovKernel join(const MarkovKernel& t1, const MarkovKernel& t2) {
  require_space(t1.source(), t2.source(), "join");
  const auto n1 = t1.rows().cols();
  const auto n2 = t2.rows().cols();
  Matrix rows(t1.rows().rows(), n1 * n2);
  for (Eigen::Index x = 0; x < rows.rows(); ++x)
    for (Eigen::Index a = 0; a < n1; ++a)
      for (Eigen::Index b = 0; b < n2; ++b) rows(x, a * n2 + b) = t1.rows()(x, a) * t2.rows()(x, b);
  return MarkovKernel(t1.source(), product(t1.target(), t2.target()), std::move(rows));
}

MarkovKernel graph(const MarkovKernel& t) { return join(MarkovKernel::identity(t.source()), t); }

MarkovKernel projection_x(const FiniteSpace& x, const FiniteSpace& y) {
  std::vector<std::size_t> image;
  image.reserve(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) image.push_back(i);
  return MarkovKernel::deterministic(product(x, y), x, image);
}

JointMeasure graph_pushforward(const MarkovKernel& t, const ProbVector& mu_x) {
  require_space(t.source(), mu_x.space(), "graph_pushforward");
  Matrix table = mu_x.weights().asDiagonal() * t.rows();
  return JointMeasure(t.source(), t.target(), std::move(table));
}

ProbVector marginal_x(const JointMeasure& mu) {
  return ProbVector(mu.xspace(), mu.table().rowwise().sum());
}

ProbVector marginal_y(const JointMeasure& mu) {
  return ProbVector(mu.yspace(), mu.table().colwise().sum().transpose());
}

JointMeasure product_measure(const ProbVector& mu_x, const ProbVector& nu_y) {
  return JointMeasure(mu_x.space(), nu_y.space(), mu_x.weights() * nu_y.weights().transpose());
}

Disintegration disintegrate(const JointMeasure& mu) {
  ProbVector marginal = marginal_x(mu);
  const auto ny = mu.table().cols();
  Matrix rows(mu.table().rows(), ny);
  for (Eigen::Index x = 0; x < rows.rows(); ++x) {
    const double m = marginal.weights()(x);
    if (m > 0.0) {
      rows.row(x) = mu.table().row(x) / m;
      // Dividing by a rounded row sum can leave the row off unit mass by an ulp or two.
      rows.row(x) /= rows.row(x).sum();
    } else {
      rows.row(x).setConstant(1.0 / static_cast<double>(ny));
    }
  }
  return {std::move(marginal), MarkovKernel(mu.xspace(), mu.yspace(), std::move(rows))};
}

bool verify_conditional(const MarkovKernel& t, const JointMeasure& mu, double tol) {
  require_space(t.source(), mu.xspace(), "verify_conditional");
  require_space(t.target(), mu.yspace(), "verify_conditional");
  const auto rebuilt = graph_pushforward(t, marginal_x(mu));
  return (rebuilt.table() - mu.table()).cwiseAbs().maxCoeff() <= tol;
}

bool ae_equal(const MarkovKernel& t1, const MarkovKernel& t2, const ProbVector& mu_x, double tol) {
  require_space(t1.source(), t2.source(), "ae_equal");
  require_space(t1.target(), t2.target(), "ae_equal");
  require_space(t1.source(), mu_x.space(), "ae_equal");
  for (Eigen::Index x = 0; x < t1.rows().rows(); ++x) {
    if (mu_x.weights()(x) <= 0.0) continue;
    if ((t1.rows().row(x) - t2.rows().row(x)).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

MarkovKernel noise_channel(const FiniteSpace& xspace, const FiniteSpace& ygrid,
                           std::span<const std::size_t> f, const OffsetNoise& noise) {
  if (f.size() != xspace.size()) throw ValidationError("noise_channel: map size mismatch");
  if (noise.weights.size() == 0) throw ValidationError("noise_channel: empty noise profile");
  check_probability(noise.weights, "noise_channel profile");
  const auto ny = static_cast<long>(ygrid.size());
  Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(xspace.size()), ny);
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (f[x] >= ygrid.size()) throw ValidationError("noise_channel: f(x) outside the grid");
    for (Eigen::Index k = 0; k < noise.weights.size(); ++k) {
      long idx = static_cast<long>(f[x]) + noise.min_offset + static_cast<long>(k);
      idx = std::clamp(idx, 0L, ny - 1);
      rows(static_cast<Eigen::Index>(x), idx) += noise.weights(k);
    }
  }
  return MarkovKernel(xspace, ygrid, std::move(rows));
}

Vector regression_function(const JointMeasure& mu, const Vector& yvalues) {
  if (static_cast<std::size_t>(yvalues.size()) != mu.yspace().size()) {
    throw ValidationError("regression_function: yvalues length mismatch");
  }
  return disintegrate(mu).kernel.rows() * yvalues;
}

}  // namespace geoml::markov
