#include "bulksurf/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bulksurf/conditions.hpp"
#include "bulksurf/energy.hpp"
#include "bulksurf/format.hpp"
#include "bulksurf/mesh.hpp"
#include "bulksurf/solver.hpp"

namespace bulksurf {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double factorial(int k) { return std::tgamma(k + 1.0); }

SuiteResult finish(std::string name, int cases, double worst, double tol, std::string detail = {}) {
  SuiteResult r;
  r.suite = std::move(name);
  r.cases = cases;
  r.max_residual = worst;
  r.tolerance = tol;
  r.passed = std::isfinite(worst) && worst <= tol;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

SuiteResult verify_multinomial(std::uint64_t seed, int cases) {
  Rng rng(seed);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    int m = uniform_int(rng, 1, 4);
    int p = uniform_int(rng, 0, 6);
    std::vector<double> u(m);
    for (auto& x : u) x = uniform(rng, 0.0, 5.0);
    EnergyConfig cfg{p, std::vector<double>(m, 1.0)};
    double s = 0.0;
    for (double x : u) s += x;
    double expected = std::pow(s, p);
    double got = eval_Hp(u, cfg);
    double rel = expected == 0.0 ? std::fabs(got) : std::fabs(got - expected) / std::fabs(expected);
    worst = std::max(worst, rel);
  }
  return finish("multinomial", cases, worst, 1e-12);
}

SuiteResult verify_lemma_a1(std::uint64_t seed, int cases) {
  Rng rng(seed);
  const double h = 1e-5;
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    int m = uniform_int(rng, 1, 3);
    int p = uniform_int(rng, 1, 5);
    EnergyConfig cfg{p, std::vector<double>(m)};
    for (auto& t : cfg.theta) t = uniform(rng, 1.0, 1.3);
    std::vector<std::array<double, 3>> coef(m);
    for (auto& k : coef) {
      k[0] = uniform(rng, 0.1, 2.0);
      k[1] = uniform(rng, -1.0, 1.0);
      k[2] = uniform(rng, -0.5, 0.5);
    }
    double t0 = uniform(rng, 0.2, 1.0);
    auto path = [&](double t) {
      std::vector<double> u(m);
      for (int i = 0; i < m; ++i) u[i] = coef[i][0] + coef[i][1] * t + coef[i][2] * t * t;
      return u;
    };
    std::vector<double> u = path(t0), du(m);
    for (int i = 0; i < m; ++i) du[i] = coef[i][1] + 2.0 * coef[i][2] * t0;
    // Keep the path inside the orthant over the stencil.
    bool inside = true;
    for (double t : {t0 - h, t0, t0 + h}) {
      for (double x : path(t)) inside = inside && x > 0.0;
    }
    if (!inside) {
      --c;
      continue;
    }
    double value = dHp_dt(u, du, cfg);
    double fd = (eval_Hp(path(t0 + h), cfg) - eval_Hp(path(t0 - h), cfg)) / (2.0 * h);
    worst = std::max(worst, std::fabs(value - fd) / (1.0 + std::fabs(value)));
  }
  return finish("a1", cases, worst, 1e-6);
}

namespace {

// Left side of the gradient identity, built per species with the product rule:
// sum_{|beta|=p-1} p!/beta! theta^{beta^2} sum_i theta_i^{2 beta_i + 1} d_i grad u_i . grad(u^beta).
double a2_left_side(const std::vector<double>& u, const Eigen::MatrixXd& gradu, const std::vector<double>& theta,
                    const std::vector<double>& d, int p) {
  const int m = static_cast<int>(u.size());
  const int n = static_cast<int>(gradu.cols());
  double total = 0.0;
  for (const auto& beta : enumerate_multi_indices(m, p - 1)) {
    double coeff = factorial(p);
    double weight = 1.0;
    for (int i = 0; i < m; ++i) {
      coeff /= factorial(beta[i]);
      weight *= std::pow(theta[i], static_cast<double>(beta[i]) * beta[i]);
    }
    Eigen::VectorXd grad_mono = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < m; ++k) {
      if (beta[k] == 0) continue;
      double part = beta[k];
      for (int i = 0; i < m; ++i) part *= std::pow(u[i], beta[i] - (i == k ? 1 : 0));
      grad_mono += part * gradu.row(k).transpose();
    }
    double inner = 0.0;
    for (int i = 0; i < m; ++i) {
      inner += std::pow(theta[i], 2.0 * beta[i] + 1.0) * d[i] * gradu.row(i).dot(grad_mono);
    }
    total += coeff * weight * inner;
  }
  return total;
}

Eigen::MatrixXd random_lower_triangular(Rng& rng, int m) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i; ++j) A(i, j) = uniform(rng, 0.0, 2.0);
  }
  return A;
}

ReactionSystem bare_system(const std::vector<double>& d) {
  ReactionSystem sys;
  sys.n = 2;
  sys.m1 = static_cast<int>(d.size());
  sys.m2 = 0;
  sys.d = d;
  sys.F.assign(d.size(), Polynomial());
  sys.G.assign(d.size(), Polynomial());
  return sys;
}

}  // namespace

SuiteResult verify_lemma_a2(std::uint64_t seed, int cases) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    int m = uniform_int(rng, 1, 3);
    int p = uniform_int(rng, 2, 4);
    int n = uniform_int(rng, 1, 3);
    std::vector<double> u(m), theta(m), d(m);
    for (auto& x : u) x = uniform(rng, 1e-3, 3.0);
    for (auto& x : theta) x = uniform(rng, 1.0, 2.0);
    for (auto& x : d) x = uniform(rng, 0.1, 3.0);
    Eigen::MatrixXd gradu(m, n);
    for (int i = 0; i < m; ++i) {
      for (int l = 0; l < n; ++l) gradu(i, l) = normal(rng);
    }
    double lhs = a2_left_side(u, gradu, theta, d, p);
    double rhs = gradient_form(u, gradu, EnergyConfig{p, theta}, d);
    double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    worst = std::max(worst, std::fabs(lhs - rhs) / scale);
  }
  return finish("a2", cases, worst, 1e-10);
}

SuiteResult verify_positive_definite(std::uint64_t seed, int cases) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  double min_ratio = INFINITY;
  int not_dominant = 0;
  for (int c = 0; c < cases; ++c) {
    int m = uniform_int(rng, 1, 3);
    int p = uniform_int(rng, 2, 4);
    int n = uniform_int(rng, 1, 3);
    std::vector<double> u(m), d(m);
    for (auto& x : u) x = uniform(rng, 1e-3, 3.0);
    for (auto& x : d) x = uniform(rng, 0.1, 3.0);
    ReactionSystem sys = bare_system(d);
    GRecursion rec = build_g_recursion(random_lower_triangular(rng, m), m);
    std::vector<double> theta = select_theta(sys, rec, p);
    if (!strictly_diagonally_dominant(script_m_matrix(d, theta))) ++not_dominant;
    Eigen::MatrixXd gradu(m, n);
    for (int i = 0; i < m; ++i) {
      for (int l = 0; l < n; ++l) gradu(i, l) = normal(rng);
    }
    double value = gradient_form(u, gradu, EnergyConfig{p, theta}, d);
    // Normalized by the diagonal part so the sign test is scale free.
    double diag = 0.0;
    for (const auto& beta : enumerate_multi_indices(m, p - 2)) {
      Eigen::MatrixXd a = quad_form_coeffs(beta, d, theta);
      double w = falling_multinomial(p, beta);
      for (int i = 0; i < m; ++i) {
        w *= std::pow(theta[i], static_cast<double>(beta[i]) * beta[i]) * std::pow(u[i], beta[i]);
      }
      for (int i = 0; i < m; ++i) diag += w * a(i, i) * gradu.row(i).squaredNorm();
    }
    min_ratio = std::min(min_ratio, value / diag);
  }
  std::ostringstream detail;
  detail << "min_normalized_form=" << format_double(min_ratio) << " not_dominant=" << not_dominant;
  SuiteResult r = finish("posdef", cases, std::max(0.0, -min_ratio), 0.0, detail.str());
  r.passed = r.passed && not_dominant == 0;
  return r;
}

SuiteResult verify_mr(std::uint64_t seed, int cases, int ntheta, double dt, double T) {
  Rng rng(seed);
  CircleMesh mesh = build_circle_mesh(ntheta, 1.0);
  const int max_mode = 12;
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    int modes = uniform_int(rng, 1, max_mode);
    std::vector<double> amp_c(modes + 1), amp_s(modes + 1), freq(modes + 1), phase(modes + 1);
    for (int k = 0; k <= modes; ++k) {
      amp_c[k] = uniform(rng, -1.0, 1.0);
      amp_s[k] = uniform(rng, -1.0, 1.0);
      freq[k] = uniform(rng, 0.0, 20.0);
      phase[k] = uniform(rng, 0.0, 2.0 * M_PI);
    }
    auto forcing = [&](double th, double t) {
      double f = 0.0;
      for (int k = 0; k <= modes; ++k) {
        f += std::cos(freq[k] * t + phase[k]) * (amp_c[k] * std::cos(k * th) + amp_s[k] * std::sin(k * th));
      }
      return f;
    };
    worst = std::max(worst, heat_mr_probe(mesh, forcing, T, dt));
  }
  return finish("mr", cases, worst, 1.02);
}

std::vector<SuiteResult> run_suites(const std::string& suite, std::uint64_t seed, int cases) {
  auto pick = [&](int fallback) { return cases > 0 ? cases : fallback; };
  std::vector<SuiteResult> out;
  bool all = suite == "all";
  if (!all && suite != "a1" && suite != "a2" && suite != "multinomial" && suite != "mr") {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  if (all || suite == "multinomial") out.push_back(verify_multinomial(seed, pick(1000)));
  if (all || suite == "a1") out.push_back(verify_lemma_a1(seed, pick(200)));
  if (all || suite == "a2") {
    out.push_back(verify_lemma_a2(seed, pick(200)));
    out.push_back(verify_positive_definite(seed, pick(1000)));
  }
  if (all || suite == "mr") out.push_back(verify_mr(seed, pick(100)));
  return out;
}

}  // namespace bulksurf
