#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bulksurf/polynomial.hpp"

namespace bulksurf {

struct MassWeights {
  std::vector<double> a;  // bulk weights, one per u_i
  std::vector<double> b;  // surface weights, one per v_j
};

struct MassConstants {
  double L = 0.0;
  double K = 0.0;
};

// u_t = d_i Lap u_i + F_i(u) in the bulk, d_i du_i/dn = G_i(u,v) on the boundary,
// v_t = delta_j Lap_M v_j + H_j(u,v) on the boundary.
struct ReactionSystem {
  int n = 2;
  int m1 = 0;
  int m2 = 0;
  std::vector<double> d;
  std::vector<double> delta;
  std::vector<Polynomial> F;  // over the m1 bulk variables
  std::vector<Polynomial> G;  // over all m1 + m2 variables
  std::vector<Polynomial> H;  // over all m1 + m2 variables
  std::optional<Eigen::MatrixXd> A;
  std::optional<MassWeights> mass_weights;
  std::optional<MassConstants> mass_constants;
  std::vector<std::string> bulk_names;
  std::vector<std::string> surface_names;

  int num_vars() const { return m1 + m2; }
  std::vector<std::string> all_names() const;

  // Fills default names when empty and checks every structural invariant.
  // Throws std::invalid_argument on violation.
  void validate();
};

// Checks shape, unit diagonal, lower triangularity and non-negativity.
void validate_matrix_A(const Eigen::MatrixXd& A, int size);

std::vector<std::string> default_names(const std::string& stem, int count);

}  // namespace bulksurf
