#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "geoml/divergences.hpp"
#include "geoml/erm.hpp"
#include "geoml/io.hpp"
#include "geoml/laplacian.hpp"
#include "geoml/markov.hpp"
#include "geoml/rkhs.hpp"
#include "geoml/spd_geometry.hpp"

namespace geoml::cli {

namespace {

std::map<std::string, double> parse_params(const std::string& text, const std::string& kind) {
  std::map<std::string, double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("kernel '" + kind + "': expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    try {
      std::size_t used = 0;
      const double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
      out[key] = v;
    } catch (const std::logic_error&) {
      throw ValidationError("kernel '" + kind + "': bad number for " + key);
    }
  }
  return out;
}

double take(std::map<std::string, double>& p, const std::string& key, const std::string& kind) {
  auto it = p.find(key);
  if (it == p.end()) throw ValidationError("kernel '" + kind + "' needs " + key + "=");
  const double v = it->second;
  p.erase(it);
  return v;
}

double take_or(std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  const double v = it->second;
  p.erase(it);
  return v;
}

std::vector<SpdMatrix> read_spd_list(const std::vector<std::string>& paths) {
  std::vector<SpdMatrix> out;
  for (const auto& p : paths) out.push_back(io::read_spd(p));
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument("size");
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ValidationError("bad size list '" + text + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty size list");
  return out;
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ValidationError("grid must look like PxQ");
  const auto a = parse_sizes(text.substr(0, x));
  const auto b = parse_sizes(text.substr(x + 1));
  if (a.size() != 1 || b.size() != 1) throw ValidationError("grid must look like PxQ");
  return {a[0], b[0]};
}

void print_value(std::ostream& out, double v) { out << io::format_double(v) << '\n'; }

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
  return s;
}

}  // namespace

kern::KernelSpec parse_kernel(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  auto p = colon == std::string::npos ? std::map<std::string, double>{} : parse_params(text.substr(colon + 1), kind);
  auto finish = [&](kern::KernelParams params) {
    if (!p.empty()) throw ValidationError("kernel '" + kind + "': unknown parameter " + p.begin()->first);
    return kern::KernelSpec(std::move(params));
  };
  if (kind == "linear") return finish(kern::Linear{});
  if (kind == "gaussian") {
    if (p.count("gamma")) return finish(kern::EuclideanGaussian{kern::sigma_from_gamma(take(p, "gamma", kind))});
    return finish(kern::EuclideanGaussian{take(p, "sigma", kind)});
  }
  if (kind == "gauss-ai" || kind == "gauss-bw" || kind == "gauss-loge") {
    const auto metric = spd::parse_metric(kind.substr(6));
    const double sigma = take(p, "sigma", kind);
    return finish(kern::GaussianMetric{metric, sigma, take_or(p, "p", 2.0)});
  }
  if (kind == "loge-exp") {
    const double sigma = take(p, "sigma", kind);
    return finish(kern::LogEExp{sigma, take_or(p, "p", 2.0)});
  }
  if (kind == "loge-poly") {
    const double c = take(p, "c", kind);
    const double d = take(p, "degree", kind);
    if (d != std::floor(d)) throw ValidationError("loge-poly degree must be an integer");
    return finish(kern::LogEPoly{c, static_cast<int>(d)});
  }
  if (kind == "stein") return finish(kern::Stein{take(p, "sigma", kind)});
  throw ValidationError("unknown kernel '" + kind + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "geoml: geometry of SPD matrices, kernels on them, kernel mean embeddings,\n"
      "Markov kernels on finite spaces and point-cloud Laplacians.\n"
      "Exit status: 0 success, 1 invalid input, 2 numerical failure.",
      "geoml"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Generator seed (mt19937_64/v1)")->capture_default_str();

  // spd
  auto* spd_cmd = app.add_subcommand("spd", "Riemannian geometry of SPD matrices");
  spd_cmd->require_subcommand(1);
  std::string metric = "ai";
  double t = 0.5;
  std::vector<std::string> files;
  auto* spd_dist = spd_cmd->add_subcommand(
      "dist",
      "Distance between two SPD matrices.\n"
      "  ai:   ||log(A^{-1/2} B A^{-1/2})||_F\n"
      "  bw:   sqrt(tr A + tr B - 2 tr (A^{1/2} B A^{1/2})^{1/2})\n"
      "  loge: ||log A - log B||_F");
  spd_dist->add_option("--metric", metric, "ai | bw | loge")->capture_default_str();
  spd_dist->add_option("files", files, "A.csv B.csv")->required()->expected(2);
  auto* spd_geo = spd_cmd->add_subcommand(
      "geodesic",
      "Point gamma(t) on the geodesic from A to B.\n"
      "  ai:   A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}\n"
      "  bw:   ((1-t)A^{1/2} + t T)(...)^T with T the optimal transport map\n"
      "  loge: exp((1-t) log A + t log B)");
  spd_geo->add_option("--metric", metric, "ai | bw | loge")->capture_default_str();
  spd_geo->add_option("--t", t, "Position in [0, 1]")->capture_default_str();
  spd_geo->add_option("files", files, "A.csv B.csv")->required()->expected(2);
  auto* spd_met = spd_cmd->add_subcommand(
      "metric",
      "Riemannian inner product <U, V>_P of symmetric tangent vectors.\n"
      "  ai:   tr(P^{-1} U P^{-1} V)\n"
      "  bw:   tr(L_P(U) P L_P(V)), L_P(U) solving X P + P X = U\n"
      "  loge: <Dlog_P(U), Dlog_P(V)>_F");
  spd_met->add_option("--metric", metric, "ai | bw | loge")->capture_default_str();
  spd_met->add_option("files", files, "P.csv U.csv V.csv")->required()->expected(3);

  // div
  auto* div_cmd = app.add_subcommand("div", "Divergences");
  div_cmd->require_subcommand(1);
  double alpha = 0.0;
  auto* div_ld = div_cmd->add_subcommand(
      "logdet",
      "Alpha Log-Det divergence for -1 < a < 1:\n"
      "  4/(1-a^2) log[ det((1-a)/2 A + (1+a)/2 B) / (det(A)^{(1-a)/2} det(B)^{(1+a)/2}) ]\n"
      "  a = 1:  tr(B^{-1}A - I) - log det(B^{-1}A);  a = -1: same with A, B swapped");
  div_ld->add_option("--alpha", alpha, "alpha in [-1, 1]")->capture_default_str();
  div_ld->add_option("files", files, "A.csv B.csv")->required()->expected(2);

  // kernel
  auto* k_cmd = app.add_subcommand("kernel", "Kernels on SPD matrices");
  k_cmd->require_subcommand(1);
  std::string kernel_text = "loge-exp:sigma=1";
  std::string vec_kernel = "gaussian:sigma=1";
  int n_dim = 3;
  double sigma = 0.75;
  std::size_t budget = 100000;
  double p_exp = 2.0;
  auto* k_gram = k_cmd->add_subcommand(
      "gram",
      "Gram matrix K[i][j] = k(A_i, A_j). Kernel descriptors:\n"
      "  gauss-ai|gauss-bw|gauss-loge:sigma=S[,p=P]  exp(-d^p / S^2)\n"
      "  loge-exp:sigma=S[,p=P]   exp(-||log A - log B||_F^p / S^2)\n"
      "  loge-poly:c=C,degree=D   (<log A, log B>_F + C)^D\n"
      "  stein:sigma=S            det(A)^{S/2} det(B)^{S/2} / det((A+B)/2)^S");
  k_gram->add_option("--kernel", kernel_text, "Kernel descriptor")->capture_default_str();
  k_gram->add_option("files", files, "SPD matrix files")->required();
  auto* k_psd = k_cmd->add_subcommand(
      "psd-check", "Smallest Gram eigenvalue and whether it is >= -1e-9 ||K||_2");
  k_psd->add_option("--kernel", kernel_text, "Kernel descriptor")->capture_default_str();
  k_psd->add_option("files", files, "SPD matrix files")->required();
  auto* k_wit = k_cmd->add_subcommand(
      "stein-witness",
      "Search for a Stein-kernel Gram with min eigenvalue < -1e-8. The kernel is\n"
      "positive definite exactly for sigma in {1/2, 1, ..., (n-1)/2} or sigma > (n-1)/2.");
  k_wit->add_option("--n", n_dim, "Matrix dimension")->capture_default_str();
  k_wit->add_option("--sigma", sigma, "Kernel parameter")->capture_default_str();
  k_wit->add_option("--budget", budget, "Gram evaluations")->capture_default_str();
  auto* k_neg = k_cmd->add_subcommand(
      "negdef",
      "Largest c^T D c over unit zero-sum c, D[i][j] = d(A_i, A_j)^p. A value <= 0\n"
      "means d^p is conditionally negative definite on these points.");
  k_neg->add_option("--metric", metric, "ai | bw | loge")->capture_default_str();
  k_neg->add_option("--p", p_exp, "Exponent")->capture_default_str();
  k_neg->add_option("files", files, "SPD matrix files")->required();

  // mmd / covdist / twolayer
  auto* mmd_cmd = app.add_subcommand(
      "mmd",
      "||M_K(S1) - M_K(S2)||_H with M_K(S) = (1/m) sum_j K(., x_j).\n"
      "Inputs are matrices whose columns are points; kernel gaussian or linear.");
  mmd_cmd->add_option("--kernel", vec_kernel, "Kernel descriptor")->capture_default_str();
  mmd_cmd->add_option("files", files, "S1.csv S2.csv")->required()->expected(2);
  double gamma1 = 1e-3, gamma2 = 1e-3;
  auto* cov_cmd = app.add_subcommand(
      "covdist",
      "Log-Hilbert-Schmidt distance between C1 + g1 I and C2 + g2 I, RKHS covariance\n"
      "operators of the column data X1, X2:\n"
      "  ||log(I+A*A)||_F^2 + ||log(I+B*B)||_F^2 - 2 tr[B*A h(A*A) A*B h(B*B)] + log(g2/g1)^2\n"
      "  A*A = J K[X1] J/(m1 g1), B*B = J K[X2] J/(m2 g2), A*B = J K[X1,X2] J/sqrt(m1 m2 g1 g2),\n"
      "  h(l) = log(1+l)/l, J = I - (1/m) 1 1^T");
  cov_cmd->add_option("--gamma1", gamma1, "Regularization of the first operator")->capture_default_str();
  cov_cmd->add_option("--gamma2", gamma2, "Regularization of the second operator")->capture_default_str();
  cov_cmd->add_option("--kernel", vec_kernel, "First-layer kernel")->capture_default_str();
  cov_cmd->add_option("files", files, "X1.csv X2.csv")->required()->expected(2);
  double gamma = 1e-3, sigma2 = 1.0;
  std::string labels_path;
  auto* two_cmd = app.add_subcommand(
      "twolayer",
      "Two-layer kernel: D[i][j] = Log-HS distance of the regularized covariance\n"
      "operators of datasets i, j, and K2[i][j] = exp(-D[i][j]^2 / sigma2^2). With\n"
      "--labels (JSON array of integers) also prints leave-one-out 1-NN predictions.");
  two_cmd->add_option("--kernel", vec_kernel, "First-layer kernel")->capture_default_str();
  two_cmd->add_option("--gamma", gamma, "Regularization")->capture_default_str();
  two_cmd->add_option("--sigma2", sigma2, "Second-layer bandwidth")->capture_default_str();
  two_cmd->add_option("--labels", labels_path, "JSON label list");
  two_cmd->add_option("files", files, "Dataset files")->required();

  // markov
  auto* mk_cmd = app.add_subcommand("markov", "Markov kernels on finite spaces");
  mk_cmd->require_subcommand(1);
  double tol = 1e-9;
  auto* mk_comp = mk_cmd->add_subcommand("compose", "(T2 o T1)(x, z) = sum_y T1(x, y) T2(y, z)");
  mk_comp->add_option("files", files, "T1.csv T2.csv")->required()->expected(2);
  auto* mk_push = mk_cmd->add_subcommand("push", "(T_* mu)(y) = sum_x T(x, y) mu(x)");
  mk_push->add_option("files", files, "T.csv mu.csv")->required()->expected(2);
  auto* mk_dis = mk_cmd->add_subcommand(
      "disintegrate",
      "Regular conditional probability mu_{Y|X}(y|x) = mu(x, y) / mu_X(x); rows with\n"
      "mu_X(x) = 0 are uniform.");
  mk_dis->add_option("files", files, "joint.csv")->required()->expected(1);
  auto* mk_ver = mk_cmd->add_subcommand(
      "verify", "Checks (Gamma_T)_* mu_X = mu, i.e. mu_X(x) T(x, y) = mu(x, y) within --tol");
  mk_ver->add_option("--tol", tol, "Max-norm tolerance")->capture_default_str();
  mk_ver->add_option("files", files, "T.csv joint.csv")->required()->expected(2);

  // laplacian
  auto* lap_cmd = app.add_subcommand("laplacian", "Point-cloud Laplace operator");
  lap_cmd->require_subcommand(1);
  std::string manifold = "circle", function = "cos", sizes_text = "500,2000,8000";
  std::size_t seeds = 20;
  double lap_alpha = 1.0;
  auto* lap_conv = lap_cmd->add_subcommand(
      "converge",
      "Median relative error of 1/(t (4 pi t)^{n/2}) (1/m) sum_j (f(p) - f(x_j)) e^{-|p-x_j|^2/4t}\n"
      "against (Delta f)(p)/vol, with t = m^{-1/(n+2+alpha)} and Delta = -div grad.\n"
      "Functions: circle {cos}, sphere {z}, torus {cos1}.");
  lap_conv->add_option("--manifold", manifold, "circle | sphere | torus")->capture_default_str();
  lap_conv->add_option("--function", function, "Eigenfunction id")->capture_default_str();
  lap_conv->add_option("--alpha", lap_alpha, "alpha > 0")->capture_default_str();
  lap_conv->add_option("--sizes", sizes_text, "Comma-separated sample sizes")->capture_default_str();
  lap_conv->add_option("--seeds", seeds, "Repetitions per size")->capture_default_str();

  // erm
  auto* erm_cmd = app.add_subcommand("erm", "Regularized ERM for conditional distributions");
  erm_cmd->require_subcommand(1);
  std::string grid_text = "5x5", true_path;
  double gamma_exp = 1.0 / 3.0, eps = 0.5, erm_sigma = 0.5;
  std::size_t erm_seeds = 10, erm_budget = 10000;
  bool no_slack = false;
  std::string erm_sizes = "50,200,800";
  auto* erm_run = erm_cmd->add_subcommand(
      "run",
      "Learning curve of argmin_f ||(Gamma_f)_* mu_{S,X} - mu_S||_{K1}^2 + g_n W(f),\n"
      "W(f) = ||f||_M + L(f) + L_Gamma(f), g_n = n^{-gamma-exp}, slack c_n = g_n^2.\n"
      "Reports the median over seeds of d_M(f_n, mu_{Y|X}) with\n"
      "d_M(f, f') = sup_x (||f(x) - f'(x)||_{K2} + ||Gamma_f(x) - Gamma_f'(x)||_{K1}).");
  erm_run->add_option("--grid", grid_text, "PxQ grid")->capture_default_str();
  erm_run->add_option("--sizes", erm_sizes, "Comma-separated sample sizes")->capture_default_str();
  erm_run->add_option("--seeds", erm_seeds, "Repetitions per size")->capture_default_str();
  erm_run->add_option("--gamma-exp", gamma_exp, "Exponent in g_n = n^{-e}")->capture_default_str();
  erm_run->add_option("--sigma", erm_sigma, "Gaussian bandwidth")->capture_default_str();
  erm_run->add_option("--eps", eps, "Failure threshold on d_M")->capture_default_str();
  erm_run->add_option("--budget", erm_budget, "Objective evaluations per fit")->capture_default_str();
  erm_run->add_flag("--no-slack", no_slack, "Use c_n = 0");
  erm_run->add_option("--true", true_path, "Joint measure CSV (default: Gaussian bump)");

  std::string selftest_out;
  auto* st_cmd = app.add_subcommand("selftest", "Fast property checks; prints CSV of pass/fail per property");
  st_cmd->add_option("--out", selftest_out, "Also write the CSV to this file");

  if (args.size() <= 1) {
    out << app.help();
    return kOk;
  }
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    // Help for a subcommand arrives as CallForHelp too; everything else is a usage error.
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kValidation;
  }

  const std::string command = join(std::vector<std::string>(args.begin() + 1, args.end()));
  try {
    if (spd_dist->parsed()) {
      const auto a = io::read_spd(files[0]);
      const auto b = io::read_spd(files[1]);
      print_value(out, spd::distance(spd::parse_metric(metric), a, b));
    } else if (spd_geo->parsed()) {
      const auto m = spd::geodesic(spd::parse_metric(metric),
                                   spd::GeodesicQuery(io::read_spd(files[0]), io::read_spd(files[1]), t));
      io::write_run_header(out, command, seed);
      io::write_matrix(out, m.matrix());
    } else if (spd_met->parsed()) {
      const auto p = io::read_spd(files[0]);
      const SymMatrix u(io::read_matrix(files[1]));
      const SymMatrix v(io::read_matrix(files[2]));
      print_value(out, spd::metric_tensor(spd::parse_metric(metric), p, u, v));
    } else if (div_ld->parsed()) {
      print_value(out, div::alpha_logdet(div::AlphaParam(alpha), io::read_spd(files[0]), io::read_spd(files[1])));
    } else if (k_gram->parsed()) {
      const auto g = kern::gram(parse_kernel(kernel_text), read_spd_list(files));
      io::write_run_header(out, command, seed);
      io::write_header(out, {{"kernel", g.spec.describe()}});
      io::write_matrix(out, g.entries);
    } else if (k_psd->parsed()) {
      const auto g = kern::gram(parse_kernel(kernel_text), read_spd_list(files));
      out << "min_eigenvalue," << io::format_double(kern::min_eigenvalue(g)) << '\n';
      out << "psd," << (kern::is_psd(g.entries) ? "yes" : "no") << '\n';
    } else if (k_wit->parsed()) {
      const kern::KernelSpec spec(kern::Stein{sigma});
      const auto w = kern::nonpd_witness_search(spec, kern::mixed_sampler(n_dim), budget, seed);
      io::write_run_header(out, command, seed);
      io::write_header(out, {{"admissible", kern::stein_admissible(n_dim, sigma) ? "yes" : "no"}});
      if (!w) {
        out << "none within budget\n";
      } else {
        io::write_header(out, {{"trial", std::to_string(w->trial)},
                               {"min_eigenvalue", io::format_double(w->min_eigenvalue)},
                               {"points", std::to_string(w->points.size())}});
        for (const auto& m : w->points) io::write_matrix(out, m.matrix());
      }
    } else if (k_neg->parsed()) {
      const auto pts = read_spd_list(files);
      const auto m = spd::parse_metric(metric);
      Rng rng(seed);
      const double top = kern::negdef_check(
          [&](const SpdMatrix& a, const SpdMatrix& b) { return std::pow(spd::distance(m, a, b), p_exp); }, pts,
          64, rng);
      out << "max_zero_sum_form," << io::format_double(top) << '\n';
    } else if (mmd_cmd->parsed()) {
      const rkhs::Sample s1(io::read_matrix(files[0]));
      const rkhs::Sample s2(io::read_matrix(files[1]));
      print_value(out, rkhs::mmd(parse_kernel(vec_kernel), s1, s2));
    } else if (cov_cmd->parsed()) {
      const rkhs::RegularizedCovariancePair pair{io::read_matrix(files[0]), io::read_matrix(files[1]), gamma1, gamma2,
                                                 parse_kernel(vec_kernel)};
      print_value(out, rkhs::loghs_cov_distance(pair));
    } else if (two_cmd->parsed()) {
      if (files.size() < 2) throw ValidationError("twolayer: need at least two datasets");
      std::vector<Matrix> data;
      for (const auto& f : files) data.push_back(io::read_matrix(f));
      const Matrix d = rkhs::two_layer_distance_matrix(data, parse_kernel(vec_kernel), gamma);
      io::write_run_header(out, command, seed);
      io::write_header(out, {{"block", "distances"}});
      io::write_matrix(out, d);
      io::write_header(out, {{"block", "kernel"}});
      io::write_matrix(out, rkhs::two_layer_kernel(d, sigma2));
      if (!labels_path.empty()) {
        std::ifstream lf(labels_path);
        if (!lf) throw ValidationError("cannot open '" + labels_path + "'");
        std::vector<int> labels;
        try {
          labels = nlohmann::json::parse(lf).get<std::vector<int>>();
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError(labels_path + ": " + e.what());
        }
        if (labels.size() != files.size()) throw ValidationError("twolayer: one label per dataset required");
        io::write_header(out, {{"block", "leave-one-out 1-NN"}});
        out << "index,label,predicted\n";
        for (std::size_t i = 0; i < files.size(); ++i) {
          std::vector<double> dist;
          std::vector<int> lab;
          for (std::size_t j = 0; j < files.size(); ++j) {
            if (j == i) continue;
            dist.push_back(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            lab.push_back(labels[j]);
          }
          out << i << ',' << labels[i] << ',' << rkhs::classify_1nn(dist, lab) << '\n';
        }
      }
    } else if (mk_comp->parsed()) {
      io::write_labelled(out, io::to_table(markov::compose(io::read_kernel(files[0]), io::read_kernel(files[1]))));
    } else if (mk_push->parsed()) {
      io::write_labelled(out, io::to_table(markov::pushforward(io::read_kernel(files[0]), io::read_measure(files[1]))));
    } else if (mk_dis->parsed()) {
      const auto d = markov::disintegrate(io::read_joint(files[0]));
      io::write_labelled(out, io::to_table(d.kernel));
    } else if (mk_ver->parsed()) {
      const bool ok = markov::verify_conditional(io::read_kernel(files[0]), io::read_joint(files[1]), tol);
      out << (ok ? "conditional" : "not conditional") << '\n';
      return ok ? kOk : kValidation;
    } else if (lap_conv->parsed()) {
      const auto mf = lap::parse_manifold(manifold);
      const auto rows = lap::convergence_sweep(mf, function, lap::default_base_point(mf), parse_sizes(sizes_text),
                                               seeds, lap_alpha, seed);
      io::write_run_header(out, command, seed);
      out << "m,median_relative_error\n";
      for (const auto& r : rows) out << r.m << ',' << io::format_double(r.median_relative_error) << '\n';
    } else if (erm_run->parsed()) {
      const auto [p, q] = parse_grid(grid_text);
      const auto model = erm::GridModel::uniform(p, q, erm_sigma);
      markov::JointMeasure truth = erm::gaussian_bump_joint(model);
      if (!true_path.empty()) {
        const auto t_in = io::read_labelled(true_path);
        truth = markov::JointMeasure(model.xspace(), model.yspace(), t_in.values);
      }
      const auto sizes = parse_sizes(erm_sizes);
      const auto schedule = erm::Schedule::power(sizes, gamma_exp, !no_slack);
      erm::ErmOptions opts;
      opts.budget = erm_budget;
      opts.seed = seed;
      const auto rows = erm::learning_curve(model, truth, sizes, schedule, erm_seeds, eps, opts);
      io::write_run_header(out, command, seed);
      out << "n,gamma,c,median_dM,failure_rate\n";
      for (const auto& r : rows) {
        out << r.n << ',' << io::format_double(r.gamma) << ',' << io::format_double(r.c) << ','
            << io::format_double(r.median_dM) << ',' << io::format_double(r.failure_rate) << '\n';
      }
    } else if (st_cmd->parsed()) {
      const auto results = selftest(seed);
      std::ostringstream csv;
      write_selftest_csv(csv, results, seed);
      out << csv.str();
      if (!selftest_out.empty()) {
        std::ofstream f(selftest_out, std::ios::binary);
        if (!f) throw ValidationError("cannot write '" + selftest_out + "'");
        f << csv.str();
      }
      const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
      return all ? kOk : kNumerical;
    }
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}

}  // namespace geoml::cli
