#include "bulksurf/reaction_system.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace bulksurf {

std::vector<std::string> default_names(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::vector<std::string> ReactionSystem::all_names() const {
  std::vector<std::string> out = bulk_names;
  out.insert(out.end(), surface_names.begin(), surface_names.end());
  return out;
}

void validate_matrix_A(const Eigen::MatrixXd& A, int size) {
  if (A.rows() != size || A.cols() != size) {
    throw std::invalid_argument("matrix A must be " + std::to_string(size) + "x" + std::to_string(size));
  }
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      double a = A(i, j);
      if (!std::isfinite(a)) throw std::invalid_argument("matrix A has a non-finite entry");
      if (j > i && a != 0.0) throw std::invalid_argument("matrix A must be lower triangular");
      if (i == j && a != 1.0) throw std::invalid_argument("matrix A must have unit diagonal");
      if (a < 0.0) throw std::invalid_argument("matrix A must have non-negative entries");
    }
  }
}

void ReactionSystem::validate() {
  if (n < 1) throw std::invalid_argument("spatial dimension n must be >= 1");
  if (m1 < 1) throw std::invalid_argument("m1 must be >= 1");
  if (m2 < 0) throw std::invalid_argument("m2 must be >= 0");
  if (n == 1 && m2 != 0) throw std::invalid_argument("n = 1 requires m2 = 0");
  if (static_cast<int>(d.size()) != m1) throw std::invalid_argument("d must have m1 entries");
  if (static_cast<int>(delta.size()) != m2) throw std::invalid_argument("delta must have m2 entries");
  for (double x : d) {
    if (!(x > 0.0)) throw std::invalid_argument("bulk diffusion coefficients must be positive");
  }
  for (double x : delta) {
    if (!(x > 0.0)) throw std::invalid_argument("surface diffusion coefficients must be positive");
  }
  if (static_cast<int>(F.size()) != m1 || static_cast<int>(G.size()) != m1 || static_cast<int>(H.size()) != m2) {
    throw std::invalid_argument("need m1 F, m1 G and m2 H nonlinearities");
  }
  for (const auto& f : F) {
    if (f.num_vars() != static_cast<std::size_t>(m1)) throw std::invalid_argument("F must depend on the bulk variables only");
  }
  for (const auto& g : G) {
    if (g.num_vars() != static_cast<std::size_t>(m1 + m2)) throw std::invalid_argument("G has wrong variable count");
  }
  for (const auto& h : H) {
    if (h.num_vars() != static_cast<std::size_t>(m1 + m2)) throw std::invalid_argument("H has wrong variable count");
  }
  if (bulk_names.empty()) bulk_names = default_names("u", m1);
  if (surface_names.empty()) surface_names = default_names("v", m2);
  if (static_cast<int>(bulk_names.size()) != m1 || static_cast<int>(surface_names.size()) != m2) {
    throw std::invalid_argument("species name lists have wrong length");
  }
  std::set<std::string> unique;
  for (const auto& s : all_names()) {
    if (!unique.insert(s).second) throw std::invalid_argument("duplicate species name '" + s + "'");
  }
  if (A) validate_matrix_A(*A, m1 + m2);
  if (mass_weights) {
    if (static_cast<int>(mass_weights->a.size()) != m1 || static_cast<int>(mass_weights->b.size()) != m2) {
      throw std::invalid_argument("mass weights must have m1 + m2 entries");
    }
    for (double w : mass_weights->a) {
      if (!(w > 0.0)) throw std::invalid_argument("mass weights must be positive");
    }
    for (double w : mass_weights->b) {
      if (!(w > 0.0)) throw std::invalid_argument("mass weights must be positive");
    }
  }
  if (mass_constants && !(mass_constants->K >= 0.0)) throw std::invalid_argument("K must be non-negative");
}

}  // namespace bulksurf
