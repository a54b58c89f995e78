#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bulksurf/reaction_system.hpp"
#include "bulksurf/sampling.hpp"

namespace bulksurf {

enum class Verdict { Skipped, Pass, SamplingOnlyPass, Fail };

std::string to_string(Verdict v);
inline bool passes(Verdict v) { return v == Verdict::Pass || v == Verdict::SamplingOnlyPass; }

struct InequalityCheck {
  std::string name;
  Verdict verdict = Verdict::Skipped;
  // Largest violation found (lhs - rhs), or the minimum value for sign checks.
  double worst_residual = 0.0;
  std::vector<double> worst_point;
  std::string note;
};

struct ConditionReport {
  Verdict quasi_positivity = Verdict::Skipped;
  Verdict flux_nonnegative = Verdict::Skipped;  // informational
  Verdict mass_control = Verdict::Skipped;
  Verdict polynomial_growth = Verdict::Skipped;
  Verdict intermediate_sum = Verdict::Skipped;

  std::optional<double> L;
  std::optional<double> K;
  bool exact_identity = false;  // weighted sums vanish symbolically
  bool conservation = false;    // L = K = 0 certified
  std::optional<double> dissipation_L;  // most negative certifying L
  std::optional<double> K1;
  std::optional<int> r;
  std::optional<double> L2;
  std::optional<double> p_omega;
  std::optional<double> p_M;
  std::optional<double> mu_M;

  std::vector<InequalityCheck> checks;

  void merge(const ConditionReport& other);
  bool uniform_in_time() const;
};

ConditionReport check_quasi_positivity(const ReactionSystem& sys, const SamplingPlan& plan = {});
ConditionReport check_mass_control(const ReactionSystem& sys, const SamplingPlan& plan = {});
ConditionReport check_polynomial_growth(const ReactionSystem& sys, const SamplingPlan& plan = {});
ConditionReport check_intermediate_sum(const ReactionSystem& sys, const SamplingPlan& plan = {});
// Runs every check whose inputs are present.
ConditionReport check_all(const ReactionSystem& sys, const SamplingPlan& plan = {});

// Linear forms over x_1..x_m1 built by the recursion
// alpha_m1 = x_m1, g_i = sum_{j>i} a_ji alpha_j, alpha_i = x_i - g_i.
struct GRecursion {
  int m1 = 0;
  std::vector<std::vector<double>> g;      // g[i] (0-based); g[m1-1] is identically 0
  std::vector<std::vector<double>> alpha;  // alpha[i]
  std::vector<std::vector<double>> g_majorant;  // g with negative coefficients dropped

  double eval_g(int i, std::span<const double> x) const;
  double eval_g_majorant(int i, std::span<const double> x) const;
  double eval_alpha(int i, std::span<const double> x) const;
};

GRecursion build_g_recursion(const Eigen::MatrixXd& A, int m1);

struct EllReport {
  Verdict verdict = Verdict::Skipped;
  std::vector<double> alpha_hat;
  double L_bulk = 0.0;
  double L_surface = 0.0;
  double L_ell = 0.0;
  double bulk_growth = -1.0;
  double surface_growth = -1.0;
  double worst_residual = 0.0;
};

// Throws std::invalid_argument when ell_j <= g_j(ell_{j+1}, ...) for some j < m1.
EllReport verify_ell_inequality(const ReactionSystem& sys, const GRecursion& rec, std::span<const double> ell,
                                 const SamplingPlan& plan = {}, double p_omega = 1.0, double p_M = 1.0);

struct TheoremExtras {
  std::optional<double> lambda;
  std::optional<double> cmr;
  std::optional<double> a;
  std::optional<double> b;
};

struct TheoremVerdict {
  bool theorem_1_1 = false;
  std::optional<bool> theorem_1_2;
  std::optional<bool> theorem_1_3;
  bool uniform_in_time = false;
  TheoremExtras extras;
  std::vector<std::string> reasons;

  std::string summary() const;
};

TheoremVerdict classify_theorem(const ReactionSystem& sys, const ConditionReport& report,
                                const TheoremExtras& extras = {});

}  // namespace bulksurf
