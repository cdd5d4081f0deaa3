#include "geoml/erm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geoml/parallel.hpp"

namespace geoml::erm {

namespace {

void check_grid(const std::vector<double>& g, const char* what) {
  if (g.empty()) throw ValidationError(std::string(what) + ": empty grid");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] >= 0.0 && g[i] <= 1.0)) throw ValidationError(std::string(what) + ": point outside [0, 1]");
    if (i > 0 && !(g[i] > g[i - 1])) throw ValidationError(std::string(what) + ": grid not strictly increasing");
  }
}

Matrix gaussian_gram(const std::vector<double>& g, double sigma) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = g[i] - g[j];
      k(i, j) = std::exp(-d * d / (sigma * sigma));
    }
  return k;
}

markov::FiniteSpace grid_space(const std::vector<double>& g) {
  std::vector<std::string> labels;
  for (double v : g) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    labels.push_back(os.str());
  }
  return markov::FiniteSpace(std::move(labels));
}

double sqrt0(double v) { return std::sqrt(std::max(v, 0.0)); }

double y_norm(const Matrix& gy, const Vector& v) { return sqrt0(v.dot(gy * v)); }

// || delta_x (x) u - delta_x' (x) v ||_{K~1}
double graph_gap(const GridModel& m, Eigen::Index x, const Vector& u, Eigen::Index x2, const Vector& v) {
  const Matrix& gx = m.gram_x();
  const Matrix& gy = m.gram_y();
  return sqrt0(gx(x, x) * u.dot(gy * u) + gx(x2, x2) * v.dot(gy * v) - 2.0 * gx(x, x2) * u.dot(gy * v));
}

// Matrix-level versions used by the optimizer (rows need not be stochastic).
double lip_rows(const GridModel& m, const Matrix& f) {
  const auto p = f.rows();
  double best = 0.0;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const Vector d = (f.row(i) - f.row(j)).transpose();
      best = std::max(best, y_norm(m.gram_y(), d) / std::abs(m.xgrid()[i] - m.xgrid()[j]));
    }
  return best;
}

double graph_lip_rows(const GridModel& m, const Matrix& f) {
  const auto p = f.rows();
  double best = 0.0;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double g = graph_gap(m, i, f.row(i).transpose(), j, f.row(j).transpose());
      best = std::max(best, g / std::abs(m.xgrid()[i] - m.xgrid()[j]));
    }
  return best;
}

double m_norm_rows(const GridModel& m, const Matrix& f) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const double yn = f.row(i).dot(m.gram_y() * f.row(i).transpose());
    best = std::max(best, sqrt0(yn) + sqrt0(m.gram_x()(i, i) * yn));
  }
  return best;
}

double w_rows(const GridModel& m, const Matrix& f) {
  return m_norm_rows(m, f) + lip_rows(m, f) + graph_lip_rows(m, f);
}

double table_norm_sq(const GridModel& m, const Matrix& w) {
  return (w.transpose() * m.gram_x() * w * m.gram_y()).trace();
}

// Problem data for one ERM instance.
struct Objective {
  const GridModel& model;
  Vector mx;     // empirical x marginal
  Matrix table;  // empirical joint
  double gamma;

  Matrix residual(const Matrix& f) const { return mx.asDiagonal() * f - table; }
  double operator()(const Matrix& f) const {
    const double fit = table_norm_sq(model, residual(f));
    return gamma > 0.0 ? fit + gamma * w_rows(model, f) : fit;
  }
  // Gradient with respect to row x: analytic for the fit term, central
  // differences for the nonsmooth W term.
  Vector row_gradient(const Matrix& f, Eigen::Index x, std::size_t& evals) const {
    const Matrix r = residual(f);
    Vector g = 2.0 * mx(x) * (model.gram_x().row(x) * r * model.gram_y()).transpose();
    if (gamma > 0.0) {
      constexpr double h = 1e-7;
      Matrix probe = f;
      for (Eigen::Index k = 0; k < f.cols(); ++k) {
        probe(x, k) = f(x, k) + h;
        const double up = w_rows(model, probe);
        probe(x, k) = f(x, k) - h;
        const double dn = w_rows(model, probe);
        probe(x, k) = f(x, k);
        g(k) += gamma * (up - dn) / (2.0 * h);
        evals += 2;
      }
    }
    return g;
  }
};

struct DescentResult {
  Matrix f;
  double value;
};

DescentResult descend(const Objective& obj, Matrix f, double c, std::size_t budget, std::size_t& evals) {
  double value = obj(f);
  ++evals;
  const std::size_t stop_at = evals + budget;
  const double tol = std::max(c, 1e-14);
  std::vector<double> steps(static_cast<std::size_t>(f.rows()), 1.0);
  while (evals < stop_at) {
    const double sweep_start = value;
    for (Eigen::Index x = 0; x < f.rows() && evals < stop_at; ++x) {
      const Vector g = obj.row_gradient(f, x, evals);
      double& step = steps[static_cast<std::size_t>(x)];
      const Vector row = f.row(x).transpose();
      for (int tries = 0; tries < 40 && evals < stop_at; ++tries) {
        const Vector cand = project_simplex(row - step * g);
        if ((cand - row).lpNorm<Eigen::Infinity>() < 1e-15) break;
        Matrix trial = f;
        trial.row(x) = cand.transpose();
        const double v = obj(trial);
        ++evals;
        if (v < value) {
          f = std::move(trial);
          value = v;
          step = std::min(step * 2.0, 1e6);
          break;
        }
        step *= 0.5;
        if (step < 1e-14) {
          step = 1e-14;
          break;
        }
      }
    }
    if (sweep_start - value < tol) break;
  }
  return {std::move(f), value};
}

}  // namespace

GridModel::GridModel(std::vector<double> xgrid, std::vector<double> ygrid, double sigma)
    : xgrid_(std::move(xgrid)),
      ygrid_(std::move(ygrid)),
      sigma_(sigma),
      xspace_(markov::FiniteSpace::indexed(1)),
      yspace_(markov::FiniteSpace::indexed(1)) {
  check_grid(xgrid_, "GridModel x");
  check_grid(ygrid_, "GridModel y");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw ValidationError("GridModel: sigma must be positive");
  xspace_ = grid_space(xgrid_);
  yspace_ = grid_space(ygrid_);
  gx_ = gaussian_gram(xgrid_, sigma_);
  gy_ = gaussian_gram(ygrid_, sigma_);
}

GridModel GridModel::uniform(std::size_t p, std::size_t q, double sigma) {
  auto grid = [](std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
  };
  return GridModel(grid(p), grid(q), sigma);
}

HypothesisField::HypothesisField(GridModel model, Matrix rows, double lip_bound)
    : model_(std::move(model)), rows_(std::move(rows)), lip_bound_(lip_bound) {
  if (rows_.rows() != static_cast<Eigen::Index>(model_.p()) ||
      rows_.cols() != static_cast<Eigen::Index>(model_.q())) {
    throw ValidationError("HypothesisField: rows must be p x q");
  }
  // MarkovKernel performs the row-stochastic check.
  (void)markov::MarkovKernel(model_.xspace(), model_.yspace(), rows_);
  if (!(lip_bound_ >= 0.0)) throw ValidationError("HypothesisField: lip_bound must be >= 0");
  if (std::isfinite(lip_bound_) && model_.p() >= 2 && lip_rows(model_, rows_) > lip_bound_ * (1 + 1e-12)) {
    throw ValidationError("HypothesisField: Lipschitz constant exceeds lip_bound");
  }
}

HypothesisField HypothesisField::from_kernel(const GridModel& model, const markov::MarkovKernel& k) {
  if (!(k.source() == model.xspace()) || !(k.target() == model.yspace())) {
    throw ValidationError("HypothesisField: kernel spaces do not match the grid");
  }
  return HypothesisField(model, k.rows());
}

markov::MarkovKernel HypothesisField::as_kernel() const {
  return markov::MarkovKernel(model_.xspace(), model_.yspace(), rows_);
}

void Schedule::validate() const {
  if (gammas.empty() || gammas.size() != cs.size()) throw ValidationError("Schedule: gammas and cs must align");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0)) throw ValidationError("Schedule: gammas must be positive");
    if (!(cs[i] >= 0.0)) throw ValidationError("Schedule: slacks must be nonnegative");
    if (i > 0 && !(gammas[i] < gammas[i - 1])) throw ValidationError("Schedule: gammas must strictly decrease");
    if (i > 0 && !(cs[i] <= cs[i - 1])) throw ValidationError("Schedule: slacks must not increase");
  }
}

Schedule Schedule::power(const std::vector<std::size_t>& sizes, double exponent, bool slack) {
  if (!(exponent > 0.0)) throw ValidationError("Schedule: exponent must be positive");
  Schedule s;
  for (std::size_t n : sizes) {
    if (n == 0) throw ValidationError("Schedule: sizes must be positive");
    const double g = std::pow(static_cast<double>(n), -exponent);
    s.gammas.push_back(g);
    s.cs.push_back(slack ? g * g : 0.0);
  }
  s.validate();
  return s;
}

double ktilde_norm(const GridModel& model, const Matrix& table) {
  if (table.rows() != static_cast<Eigen::Index>(model.p()) || table.cols() != static_cast<Eigen::Index>(model.q())) {
    throw ValidationError("ktilde_norm: table must be p x q");
  }
  return sqrt0(table_norm_sq(model, table));
}

double ktilde_norm(const GridModel& model, const markov::SignedVector& mu) {
  const auto p = static_cast<Eigen::Index>(model.p());
  const auto q = static_cast<Eigen::Index>(model.q());
  if (mu.weights().size() != p * q) throw ValidationError("ktilde_norm: measure size must be p * q");
  const Matrix table = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      mu.weights().data(), p, q);
  return ktilde_norm(model, table);
}

double ktilde2_norm(const GridModel& model, const Vector& nu) {
  if (nu.size() != static_cast<Eigen::Index>(model.q())) throw ValidationError("ktilde2_norm: size mismatch");
  return y_norm(model.gram_y(), nu);
}

double lipschitz_constant(const HypothesisField& f) {
  if (f.model().p() < 2) throw ValidationError("lipschitz_constant: need at least two x points");
  return lip_rows(f.model(), f.rows());
}

double graph_lipschitz_constant(const HypothesisField& f) {
  if (f.model().p() < 2) throw ValidationError("graph_lipschitz_constant: need at least two x points");
  return graph_lip_rows(f.model(), f.rows());
}

double m_norm(const HypothesisField& f) { return m_norm_rows(f.model(), f.rows()); }

double dM_distance(const HypothesisField& f, const HypothesisField& g) {
  if (!(f.model() == g.model())) throw ValidationError("dM_distance: fields live on different grids");
  const GridModel& m = f.model();
  double best = 0.0;
  for (Eigen::Index x = 0; x < f.rows().rows(); ++x) {
    const Vector d = (f.rows().row(x) - g.rows().row(x)).transpose();
    const Vector u = f.rows().row(x).transpose();
    const Vector v = g.rows().row(x).transpose();
    best = std::max(best, y_norm(m.gram_y(), d) + graph_gap(m, x, u, x, v));
  }
  return best;
}

double w_functional(const HypothesisField& f) {
  const double lips = f.model().p() >= 2 ? lipschitz_constant(f) + graph_lipschitz_constant(f) : 0.0;
  return m_norm(f) + lips;
}

markov::JointMeasure empirical_joint(const GridModel& model, const GridSample& s) {
  if (s.empty()) throw ValidationError("empirical_joint: empty sample");
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(model.p()), static_cast<Eigen::Index>(model.q()));
  for (const auto& [x, y] : s) {
    if (x >= model.p() || y >= model.q()) throw ValidationError("empirical_joint: sample off the grid");
    t(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += 1.0;
  }
  t /= static_cast<double>(s.size());
  return markov::JointMeasure(model.xspace(), model.yspace(), t);
}

double loss(const HypothesisField& f, const markov::JointMeasure& mu) {
  if (!(mu.xspace() == f.model().xspace()) || !(mu.yspace() == f.model().yspace())) {
    throw ValidationError("loss: measure does not live on the field's grid");
  }
  const Vector mx = markov::marginal_x(mu).weights();
  return ktilde_norm(f.model(), Matrix(mx.asDiagonal() * f.rows() - mu.table()));
}

double regularized_risk(const HypothesisField& f, const markov::JointMeasure& mu_s, double gamma) {
  if (!(gamma >= 0.0)) throw ValidationError("regularized_risk: gamma must be >= 0");
  const double l = loss(f, mu_s);
  return l * l + gamma * w_functional(f);
}

Vector project_simplex(const Vector& v) {
  const auto n = v.size();
  Vector u = v;
  std::sort(u.data(), u.data() + n, std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumsum += u(i);
    const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u(i) - t > 0.0) theta = t;
  }
  Vector out = (v.array() - theta).max(0.0).matrix();
  // Renormalize away rounding so the row passes the mass check.
  return out / out.sum();
}

ErmResult erm_minimize(const GridModel& model, const markov::JointMeasure& mu_s, double gamma, double c,
                       const ErmOptions& opts) {
  if (opts.budget < 1) throw ValidationError("erm_minimize: budget must be >= 1");
  if (!(gamma >= 0.0) || !(c >= 0.0)) throw ValidationError("erm_minimize: gamma and c must be >= 0");
  if (!(mu_s.xspace() == model.xspace()) || !(mu_s.yspace() == model.yspace())) {
    throw ValidationError("erm_minimize: sample measure does not live on the grid");
  }
  const Objective obj{model, markov::marginal_x(mu_s).weights(), mu_s.table(), gamma};
  const auto p = static_cast<Eigen::Index>(model.p());
  const auto q = static_cast<Eigen::Index>(model.q());
  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  const std::size_t per_start = std::max<std::size_t>(opts.budget / restarts, 1);

  std::size_t evals = 0;
  Matrix best;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    Matrix start;
    if (r == 0) {
      start = markov::disintegrate(mu_s).kernel.rows();
    } else if (r == 1) {
      start = Matrix::Constant(p, q, 1.0 / static_cast<double>(q));
    } else {
      Rng rng = Rng::stream(opts.seed, r);
      start.resize(p, q);
      for (Eigen::Index x = 0; x < p; ++x) start.row(x) = rng.dirichlet(q).transpose();
    }
    auto res = descend(obj, std::move(start), c, per_start, evals);
    if (res.value < best_value) {
      best_value = res.value;
      best = std::move(res.f);
    }
  }
  HypothesisField field(model, best);
  return {std::move(field), regularized_risk(HypothesisField(model, best), mu_s, gamma), evals};
}

std::vector<Vector> simplex_lattice(std::size_t q, double step) {
  if (q < 1 || !(step > 0.0 && step <= 1.0)) throw ValidationError("simplex_lattice: need q >= 1, step in (0, 1]");
  const int k = static_cast<int>(std::lround(1.0 / step));
  if (std::abs(k * step - 1.0) > 1e-9) throw ValidationError("simplex_lattice: 1/step must be an integer");
  std::vector<Vector> out;
  std::vector<int> parts(q, 0);
  // Enumerate compositions of k into q nonnegative parts.
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == q) {
      parts[i] = left;
      Vector v(static_cast<Eigen::Index>(q));
      for (std::size_t j = 0; j < q; ++j) v(static_cast<Eigen::Index>(j)) = parts[j] / static_cast<double>(k);
      out.push_back(std::move(v));
      return;
    }
    for (int a = left; a >= 0; --a) {
      parts[i] = a;
      rec(i + 1, left - a);
    }
  };
  rec(0, k);
  return out;
}

std::pair<double, HypothesisField> lattice_baseline(
    const GridModel& model, double step, const std::function<double(const HypothesisField&)>& objective,
    std::size_t max_fields) {
  const auto lattice = simplex_lattice(model.q(), step);
  double total = 1.0;
  for (std::size_t i = 0; i < model.p(); ++i) total *= static_cast<double>(lattice.size());
  if (total > static_cast<double>(max_fields)) throw ValidationError("lattice_baseline: enumeration too large");
  const auto p = static_cast<Eigen::Index>(model.p());
  std::vector<std::size_t> idx(model.p(), 0);
  Matrix rows(p, static_cast<Eigen::Index>(model.q()));
  double best = std::numeric_limits<double>::infinity();
  Matrix best_rows;
  while (true) {
    for (Eigen::Index x = 0; x < p; ++x) rows.row(x) = lattice[idx[x]].transpose();
    const double v = objective(HypothesisField(model, rows));
    if (v < best) {
      best = v;
      best_rows = rows;
    }
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == lattice.size()) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  return {best, HypothesisField(model, best_rows)};
}

std::pair<double, HypothesisField> random_search_baseline(
    const GridModel& model, std::size_t draws, std::uint64_t seed,
    const std::function<double(const HypothesisField&)>& objective) {
  if (model.p() > 4 || model.q() > 4) throw ValidationError("random_search_baseline: grids up to 4 x 4 only");
  if (draws == 0) throw ValidationError("random_search_baseline: draws must be positive");
  const auto p = static_cast<Eigen::Index>(model.p());
  const auto q = static_cast<Eigen::Index>(model.q());
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  Matrix best_rows;
  for (std::size_t i = 0; i < draws; ++i) {
    Matrix rows(p, q);
    for (Eigen::Index x = 0; x < p; ++x) rows.row(x) = rng.dirichlet(q).transpose();
    const double v = objective(HypothesisField(model, rows));
    if (v < best) {
      best = v;
      best_rows = rows;
    }
  }
  return {best, HypothesisField(model, best_rows)};
}

double estimation_error(const HypothesisField& f, const markov::JointMeasure& mu, double baseline) {
  return loss(f, mu) - baseline;
}

markov::JointMeasure gaussian_bump_joint(const GridModel& model, double a, double b, double width) {
  if (!(width > 0.0)) throw ValidationError("gaussian_bump_joint: width must be positive");
  const auto p = static_cast<Eigen::Index>(model.p());
  const auto q = static_cast<Eigen::Index>(model.q());
  Matrix t(p, q);
  for (Eigen::Index x = 0; x < p; ++x) {
    const double centre = a + b * model.xgrid()[x];
    for (Eigen::Index y = 0; y < q; ++y) {
      const double d = model.ygrid()[y] - centre;
      t(x, y) = std::exp(-d * d / (2.0 * width * width));
    }
    t.row(x) /= t.row(x).sum() * static_cast<double>(p);
  }
  return markov::JointMeasure(model.xspace(), model.yspace(), t);
}

GridSample sample_joint(const markov::JointMeasure& mu, std::size_t n, Rng& rng) {
  const Matrix& t = mu.table();
  const auto q = t.cols();
  std::vector<double> cdf;
  double acc = 0.0;
  for (Eigen::Index x = 0; x < t.rows(); ++x)
    for (Eigen::Index y = 0; y < q; ++y) cdf.push_back(acc += t(x, y));
  GridSample out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    out.emplace_back(k / static_cast<std::size_t>(q), k % static_cast<std::size_t>(q));
  }
  return out;
}

std::vector<CurveRow> learning_curve(const GridModel& model, const markov::JointMeasure& mu_true,
                                     const std::vector<std::size_t>& sizes, const Schedule& schedule,
                                     std::size_t seeds, double eps, const ErmOptions& opts) {
  schedule.validate();
  if (sizes.size() != schedule.gammas.size()) throw ValidationError("learning_curve: schedule length mismatch");
  if (seeds == 0) throw ValidationError("learning_curve: seeds must be positive");
  if (!(mu_true.xspace() == model.xspace()) || !(mu_true.yspace() == model.yspace())) {
    throw ValidationError("learning_curve: true measure does not live on the grid");
  }
  const Vector mx = markov::marginal_x(mu_true).weights();
  if ((mx.array() <= 0.0).any()) throw ValidationError("learning_curve: true x marginal must have full support");
  const HypothesisField truth(model, markov::disintegrate(mu_true).kernel.rows());

  const std::size_t units = sizes.size() * seeds;
  std::vector<double> dm(units);
  parallel_for(units, [&](std::size_t u) {
    const std::size_t s = u / sizes.size();
    const std::size_t k = u % sizes.size();
    Rng rng = Rng::stream(opts.seed, s * sizes.size() + k);
    const auto sample = sample_joint(mu_true, sizes[k], rng);
    const auto emp = empirical_joint(model, sample);
    ErmOptions o = opts;
    o.seed = rng.bits();
    const auto res = erm_minimize(model, emp, schedule.gammas[k], schedule.cs[k], o);
    dm[u] = dM_distance(res.field, truth);
  });

  std::vector<CurveRow> rows;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    std::vector<double> v;
    std::size_t fails = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
      v.push_back(dm[s * sizes.size() + k]);
      if (v.back() > eps) ++fails;
    }
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    const double med = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    rows.push_back({sizes[k], schedule.gammas[k], schedule.cs[k], med,
                    static_cast<double>(fails) / static_cast<double>(seeds)});
  }
  return rows;
}

}  // namespace geoml::erm
