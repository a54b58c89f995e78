#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bulksurf {

struct SuiteResult {
  std::string suite;
  int cases = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

// H_p at theta = 1 against (sum u)^p; random u in [0,5]^m, m <= 4, p <= 6.
SuiteResult verify_multinomial(std::uint64_t seed, int cases = 1000);

// dHp_dt against centered differences (h = 1e-5) of H_p along random quadratic
// paths; residual scaled by 1 + |value|. m1 <= 3, p <= 5.
SuiteResult verify_lemma_a1(std::uint64_t seed, int cases = 200);

// gradient_form against the per-species product-rule expansion, relative
// residual. m1 <= 3, p in {2,3,4}, n <= 3.
SuiteResult verify_lemma_a2(std::uint64_t seed, int cases = 200);

// Minimum of gradient_form over random gradients with theta from select_theta
// for random diffusion vectors and random lower-triangular A; passes when >= 0
// and the script-M matrix is strictly diagonally dominant in every case.
SuiteResult verify_positive_definite(std::uint64_t seed, int cases = 1000);

// Largest heat_mr_probe ratio over random band-limited forcings.
SuiteResult verify_mr(std::uint64_t seed, int cases = 100, int ntheta = 128, double dt = 5e-4, double T = 1.0);

// Runs a1, a2, multinomial and mr, or one of them.
std::vector<SuiteResult> run_suites(const std::string& suite, std::uint64_t seed, int cases = 0);

}  // namespace bulksurf
