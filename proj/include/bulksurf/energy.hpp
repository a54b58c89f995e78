#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bulksurf/conditions.hpp"
#include "bulksurf/polynomial.hpp"
#include "bulksurf/reaction_system.hpp"

namespace bulksurf {

inline constexpr int kMaxEnergyOrder = 20;
inline constexpr int kMaxEnergySpecies = 8;

struct EnergyConfig {
  int p = 2;
  std::vector<double> theta;

  int m1() const { return static_cast<int>(theta.size()); }
};

// All beta in Z_+^m with |beta| = p, in graded-lex order (largest first).
// Results are cached per (m, p).
const std::vector<MultiIndex>& enumerate_multi_indices(int m, int p);

// p! / (beta_1! ... beta_m!) with |beta| = p, exact for p <= 20.
std::uint64_t multinomial(int p, const MultiIndex& beta);

// p! / (beta_1! ... beta_m!) for |beta| <= p.
double falling_multinomial(int p, const MultiIndex& beta);

// H_p[u] = sum_{|beta|=p} (p over beta) theta^{beta^2} u^beta
double eval_Hp(std::span<const double> u, const EnergyConfig& cfg);

// L_p[u] = sum over cells of volume * H_p(u at cell); u[i][cell].
double eval_Lp(std::span<const double> volumes, const std::vector<std::vector<double>>& u, const EnergyConfig& cfg);

// Time derivative of H_p along u' (chain rule in closed form).
double dHp_dt(std::span<const double> u, std::span<const double> dudt, const EnergyConfig& cfg);

// Quadratic form coefficients a_ij(beta).
Eigen::MatrixXd quad_form_coeffs(const MultiIndex& beta, std::span<const double> d, std::span<const double> theta);

// sum_{|beta|=p-2} (p over beta) theta^{beta^2} u^beta sum_l sum_ij a_ij(beta) du_i/dx_l du_j/dx_l;
// gradu is m1 x n.
double gradient_form(std::span<const double> u, const Eigen::MatrixXd& gradu, const EnergyConfig& cfg,
                     std::span<const double> d);

// Diagonal d_i theta_i^2, off-diagonal (d_i + d_j) / 2.
Eigen::MatrixXd script_m_matrix(std::span<const double> d, std::span<const double> theta);

bool strictly_diagonally_dominant(const Eigen::MatrixXd& M);

// Chooses theta_{m1}, ..., theta_1 so the script-M matrix is strictly diagonally
// dominant and theta_j exceeds g_j at every scanned power tuple of later thetas.
std::vector<double> select_theta(const ReactionSystem& sys, const GRecursion& rec, int p);

// Largest value of the g_j majorant over the scanned power tuples.
double theta_gap(const GRecursion& rec, std::span<const double> theta, int j, int p);

// (1, max theta^{p^2}): (sum u)^p <= H_p <= upper (sum u)^p for u >= 0.
std::pair<double, double> norm_equivalence_bounds(const EnergyConfig& cfg);

}  // namespace bulksurf
