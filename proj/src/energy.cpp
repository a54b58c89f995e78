#include "bulksurf/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace bulksurf {

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("binomial coefficient overflow");
  }
  return static_cast<std::uint64_t>(r);
}

void enumerate_into(int m, int p, std::vector<int>& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == m - 1) {
    cur[pos] = p;
    out.emplace_back(cur);
    return;
  }
  for (int k = p; k >= 0; --k) {
    cur[pos] = k;
    enumerate_into(m, p - k, cur, pos + 1, out);
  }
}

double theta_power(std::span<const double> theta, const MultiIndex& beta) {
  double r = 1.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (beta[i] > 0) r *= std::pow(theta[i], static_cast<double>(beta[i]) * beta[i]);
  }
  return r;
}

double u_power(std::span<const double> u, const MultiIndex& beta) {
  double r = 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (int k = 0; k < beta[i]; ++k) r *= u[i];
  }
  return r;
}

void check_config(const EnergyConfig& cfg) {
  if (cfg.p < 0 || cfg.p > kMaxEnergyOrder) throw std::invalid_argument("energy order p must lie in [0, 20]");
  if (cfg.m1() < 1 || cfg.m1() > kMaxEnergySpecies) throw std::invalid_argument("energy needs 1..8 species");
}

}  // namespace

const std::vector<MultiIndex>& enumerate_multi_indices(int m, int p) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (p < 0) throw std::invalid_argument("p must be >= 0");
  if (p > kMaxExponent) throw std::overflow_error("order exceeds exponent cap");
  static std::shared_mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<const std::vector<MultiIndex>>> cache;
  {
    std::shared_lock lock(mutex);
    auto it = cache.find({m, p});
    if (it != cache.end()) return *it->second;
  }
  std::uint64_t count = binomial(static_cast<std::uint64_t>(p + m - 1), static_cast<std::uint64_t>(m - 1));
  if (count > (std::uint64_t{1} << 32)) throw std::overflow_error("multi-index count exceeds 2^32");
  auto list = std::make_unique<std::vector<MultiIndex>>();
  list->reserve(count);
  std::vector<int> cur(static_cast<std::size_t>(m), 0);
  enumerate_into(m, p, cur, 0, *list);
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.try_emplace({m, p}, std::move(list));
  return *it->second;
}

std::uint64_t multinomial(int p, const MultiIndex& beta) {
  if (p < 0 || p > kMaxEnergyOrder) throw std::overflow_error("multinomial guarded to p <= 20");
  if (beta.order() != p) throw std::invalid_argument("multinomial needs |beta| = p");
  std::uint64_t r = 1;
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    s += static_cast<std::uint64_t>(beta[i]);
    r *= binomial(s, static_cast<std::uint64_t>(beta[i]));
  }
  return r;
}

double falling_multinomial(int p, const MultiIndex& beta) {
  int q = beta.order();
  if (q > p) throw std::invalid_argument("falling multinomial needs |beta| <= p");
  double r = static_cast<double>(multinomial(q, beta));
  for (int k = q + 1; k <= p; ++k) r *= k;
  return r;
}

double eval_Hp(std::span<const double> u, const EnergyConfig& cfg) {
  check_config(cfg);
  if (u.size() != cfg.theta.size()) throw std::invalid_argument("u has wrong length");
  double sum = 0.0;
  for (const auto& beta : enumerate_multi_indices(cfg.m1(), cfg.p)) {
    sum += static_cast<double>(multinomial(cfg.p, beta)) * theta_power(cfg.theta, beta) * u_power(u, beta);
  }
  return sum;
}

double eval_Lp(std::span<const double> volumes, const std::vector<std::vector<double>>& u, const EnergyConfig& cfg) {
  check_config(cfg);
  if (static_cast<int>(u.size()) != cfg.m1()) throw std::invalid_argument("field count differs from m1");
  for (const auto& f : u) {
    if (f.size() != volumes.size()) throw std::invalid_argument("field length differs from cell count");
  }
  std::vector<double> local(u.size());
  double total = 0.0;
  for (std::size_t c = 0; c < volumes.size(); ++c) {
    for (std::size_t i = 0; i < u.size(); ++i) local[i] = u[i][c];
    total += volumes[c] * eval_Hp(local, cfg);
  }
  return total;
}

double dHp_dt(std::span<const double> u, std::span<const double> dudt, const EnergyConfig& cfg) {
  check_config(cfg);
  if (u.size() != cfg.theta.size() || dudt.size() != u.size()) throw std::invalid_argument("u, du/dt have wrong length");
  if (cfg.p == 0) return 0.0;
  if (cfg.p == 1) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += cfg.theta[j] * dudt[j];
    return s;
  }
  double sum = 0.0;
  for (const auto& beta : enumerate_multi_indices(cfg.m1(), cfg.p - 1)) {
    double inner = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) inner += std::pow(cfg.theta[j], 2.0 * beta[j] + 1.0) * dudt[j];
    sum += falling_multinomial(cfg.p, beta) * theta_power(cfg.theta, beta) * u_power(u, beta) * inner;
  }
  return sum;
}

Eigen::MatrixXd quad_form_coeffs(const MultiIndex& beta, std::span<const double> d, std::span<const double> theta) {
  const std::size_t m = theta.size();
  if (d.size() != m || beta.size() != m) throw std::invalid_argument("beta, d, theta lengths differ");
  Eigen::MatrixXd a(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) {
        a(i, i) = d[i] * std::pow(theta[i], 4.0 * beta[i] + 4.0);
      } else {
        a(i, j) = 0.5 * (d[i] + d[j]) * std::pow(theta[i], 2.0 * beta[i] + 1.0) * std::pow(theta[j], 2.0 * beta[j] + 1.0);
      }
    }
  }
  return a;
}

double gradient_form(std::span<const double> u, const Eigen::MatrixXd& gradu, const EnergyConfig& cfg,
                     std::span<const double> d) {
  check_config(cfg);
  if (cfg.p < 2) throw std::invalid_argument("gradient form needs p >= 2");
  const std::size_t m = cfg.theta.size();
  if (u.size() != m || d.size() != m || static_cast<std::size_t>(gradu.rows()) != m) {
    throw std::invalid_argument("u, gradient or d has wrong dimension");
  }
  double sum = 0.0;
  for (const auto& beta : enumerate_multi_indices(cfg.m1(), cfg.p - 2)) {
    Eigen::MatrixXd a = quad_form_coeffs(beta, d, cfg.theta);
    double q = (gradu.transpose() * a * gradu).trace();
    sum += falling_multinomial(cfg.p, beta) * theta_power(cfg.theta, beta) * u_power(u, beta) * q;
  }
  return sum;
}

Eigen::MatrixXd script_m_matrix(std::span<const double> d, std::span<const double> theta) {
  const std::size_t m = theta.size();
  if (d.size() != m) throw std::invalid_argument("d and theta lengths differ");
  Eigen::MatrixXd M(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) M(i, j) = i == j ? d[i] * theta[i] * theta[i] : 0.5 * (d[i] + d[j]);
  }
  return M;
}

bool strictly_diagonally_dominant(const Eigen::MatrixXd& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j != i) off += std::fabs(M(i, j));
    }
    if (!(std::fabs(M(i, i)) > off)) return false;
  }
  return true;
}

double theta_gap(const GRecursion& rec, std::span<const double> theta, int j, int p) {
  const int m1 = rec.m1;
  if (j >= m1 - 1) return 0.0;
  const int later = m1 - 1 - j;
  const int top = 2 * p - 1;
  std::vector<double> x(static_cast<std::size_t>(m1), 0.0);
  if (later > 4) {
    for (int k = j + 1; k < m1; ++k) x[k] = std::pow(theta[k], top);
    return rec.eval_g_majorant(j, x);
  }
  std::vector<int> powers(static_cast<std::size_t>(later), 1);
  double best = -INFINITY;
  while (true) {
    for (int k = 0; k < later; ++k) x[j + 1 + k] = std::pow(theta[j + 1 + k], powers[k]);
    best = std::max(best, rec.eval_g_majorant(j, x));
    int k = 0;
    while (k < later && ++powers[k] > top) powers[k++] = 1;
    if (k == later) break;
  }
  return best;
}

std::vector<double> select_theta(const ReactionSystem& sys, const GRecursion& rec, int p) {
  if (p < 2 || p > kMaxEnergyOrder) throw std::invalid_argument("theta selection needs 2 <= p <= 20");
  const int m1 = sys.m1;
  if (rec.m1 != m1) throw std::invalid_argument("recursion built for a different m1");
  if (m1 > kMaxEnergySpecies) throw std::invalid_argument("theta selection supports at most 8 species");
  constexpr double kMargin = 1.01;
  std::vector<double> theta(static_cast<std::size_t>(m1), 1.0);
  for (int j = m1 - 1; j >= 0; --j) {
    double off = 0.0;
    for (int i = 0; i < m1; ++i) {
      if (i != j) off += 0.5 * (sys.d[i] + sys.d[j]);
    }
    double dominance = std::sqrt(off / sys.d[j]);
    double gap = theta_gap(rec, theta, j, p);
    theta[j] = std::max({1.0, dominance, gap}) * kMargin;
    if (!std::isfinite(theta[j])) throw std::overflow_error("theta selection overflowed");
  }
  return theta;
}

std::pair<double, double> norm_equivalence_bounds(const EnergyConfig& cfg) {
  double mx = 1.0;
  for (double t : cfg.theta) {
    if (t < 1.0) throw std::invalid_argument("theta entries must be >= 1");
    mx = std::max(mx, t);
  }
  return {1.0, std::pow(mx, static_cast<double>(cfg.p) * cfg.p)};
}

}  // namespace bulksurf
