#include "bulksurf/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bulksurf/format.hpp"

namespace bulksurf {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Skipped: return "skipped";
    case Verdict::Pass: return "pass";
    case Verdict::SamplingOnlyPass: return "sampling-only-pass";
    case Verdict::Fail: return "fail";
  }
  return "unknown";
}

namespace {

Verdict worst_of(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::Skipped: return 0;
      case Verdict::Pass: return 1;
      case Verdict::SamplingOnlyPass: return 2;
      case Verdict::Fail: return 3;
    }
    return 3;
  };
  return rank(a) >= rank(b) ? a : b;
}

Verdict ok_verdict(bool pos_involved) { return pos_involved ? Verdict::SamplingOnlyPass : Verdict::Pass; }

std::vector<bool> all_active(std::size_t n) { return std::vector<bool>(n, true); }

struct BoxExtreme {
  double max = -std::numeric_limits<double>::infinity();
  double min = std::numeric_limits<double>::infinity();
  double abs_max = 0.0;
  std::vector<double> argmax;
  std::vector<double> argmin;
};

// Extremes of fn(x) over the sample set, with x optionally pinned to zero at one coordinate.
template <class Fn>
BoxExtreme scan(const SampleSet& box, Fn&& fn, int pinned = -1) {
  BoxExtreme e;
  std::vector<double> x(box.dim());
  for (std::size_t k = 0; k < box.size(); ++k) {
    auto p = box.point(k);
    std::copy(p.begin(), p.end(), x.begin());
    if (pinned >= 0) x[static_cast<std::size_t>(pinned)] = 0.0;
    double v = fn(x);
    e.abs_max = std::max(e.abs_max, std::fabs(v));
    if (v > e.max) {
      e.max = v;
      e.argmax = x;
    }
    if (v < e.min) {
      e.min = v;
      e.argmin = x;
    }
  }
  return e;
}

double tolerance(double scale) { return 1e-9 * (1.0 + scale); }

double power_sum(const std::vector<double>& x, double p) {
  double s = 0.0;
  for (double v : x) s += std::pow(v, p);
  return s;
}

Polynomial total_mass_poly(std::size_t nvars) {
  Polynomial s(nvars);
  for (std::size_t i = 0; i < nvars; ++i) s += Polynomial::variable(nvars, i);
  return s;
}

// Sign check of P >= -tol on the face x_i = 0.
InequalityCheck face_check(const std::string& name, const Polynomial& P, std::size_t i, const SamplingPlan& plan) {
  SampleSet box(plan, P.num_vars());
  BoxExtreme all = scan(box, [&](const std::vector<double>& x) { return P.evaluate(x); });
  BoxExtreme face = scan(box, [&](const std::vector<double>& x) { return P.evaluate(x); }, static_cast<int>(i));
  InequalityCheck c;
  c.name = name;
  c.worst_residual = face.min;
  c.worst_point = face.argmin;
  bool sampled_ok = face.min >= -tolerance(all.abs_max);
  std::vector<bool> active = all_active(P.num_vars());
  active[i] = false;
  RayGrowth neg = ray_growth(-P, active, plan.rng_seed + i);
  bool asymptotic_ok = neg.degree < 0.0;
  if (sampled_ok && asymptotic_ok) {
    c.verdict = ok_verdict(P.has_pos());
  } else {
    c.verdict = Verdict::Fail;
    if (sampled_ok) {
      c.note = "negative along a ray of the face";
      c.worst_point = neg.witness;
      for (double& w : c.worst_point) w *= 2.0 * plan.box_radius;
      c.worst_residual = P.evaluate(c.worst_point);
    }
  }
  return c;
}

}  // namespace

void ConditionReport::merge(const ConditionReport& o) {
  quasi_positivity = worst_of(quasi_positivity, o.quasi_positivity);
  flux_nonnegative = worst_of(flux_nonnegative, o.flux_nonnegative);
  mass_control = worst_of(mass_control, o.mass_control);
  polynomial_growth = worst_of(polynomial_growth, o.polynomial_growth);
  intermediate_sum = worst_of(intermediate_sum, o.intermediate_sum);
  if (o.L) L = o.L;
  if (o.K) K = o.K;
  exact_identity = exact_identity || o.exact_identity;
  conservation = conservation || o.conservation;
  if (o.dissipation_L) dissipation_L = o.dissipation_L;
  if (o.K1) K1 = o.K1;
  if (o.r) r = o.r;
  if (o.L2) L2 = o.L2;
  if (o.p_omega) p_omega = o.p_omega;
  if (o.p_M) p_M = o.p_M;
  if (o.mu_M) mu_M = o.mu_M;
  checks.insert(checks.end(), o.checks.begin(), o.checks.end());
}

bool ConditionReport::uniform_in_time() const {
  return passes(mass_control) && (conservation || dissipation_L.has_value() || (L && *L < 0.0));
}

ConditionReport check_quasi_positivity(const ReactionSystem& sys, const SamplingPlan& plan) {
  ConditionReport rep;
  rep.quasi_positivity = Verdict::Pass;
  rep.flux_nonnegative = Verdict::Pass;
  const auto names = sys.all_names();
  for (int i = 0; i < sys.m1; ++i) {
    auto c = face_check("F" + std::to_string(i + 1) + "@" + names[i] + "=0", sys.F[i], i, plan);
    rep.quasi_positivity = worst_of(rep.quasi_positivity, c.verdict);
    rep.checks.push_back(c);
    c = face_check("G" + std::to_string(i + 1) + "@" + names[i] + "=0", sys.G[i], i, plan);
    rep.quasi_positivity = worst_of(rep.quasi_positivity, c.verdict);
    rep.checks.push_back(c);
  }
  for (int j = 0; j < sys.m2; ++j) {
    auto c = face_check("H" + std::to_string(j + 1) + "@" + names[sys.m1 + j] + "=0", sys.H[j], sys.m1 + j, plan);
    rep.quasi_positivity = worst_of(rep.quasi_positivity, c.verdict);
    rep.checks.push_back(c);
  }
  SampleSet box(plan, sys.num_vars());
  for (int i = 0; i < sys.m1; ++i) {
    const Polynomial& g = sys.G[i];
    BoxExtreme e = scan(box, [&](const std::vector<double>& x) { return g.evaluate(x); });
    InequalityCheck c;
    c.name = "G" + std::to_string(i + 1) + ">=0";
    c.worst_residual = e.min;
    c.worst_point = e.argmin;
    bool nonneg_coeffs = !g.has_pos();
    for (const auto& [beta, coef] : g.terms()) nonneg_coeffs = nonneg_coeffs && coef >= 0.0;
    if (nonneg_coeffs) {
      c.verdict = Verdict::Pass;
    } else {
      c.verdict = e.min >= -tolerance(e.abs_max) ? ok_verdict(true) : Verdict::Fail;
    }
    c.note = "informational";
    rep.flux_nonnegative = worst_of(rep.flux_nonnegative, c.verdict);
    rep.checks.push_back(c);
  }
  return rep;
}

ConditionReport check_mass_control(const ReactionSystem& sys, const SamplingPlan& plan) {
  if (!sys.mass_weights) throw std::invalid_argument("mass control check needs mass weights a, b");
  const auto& w = *sys.mass_weights;
  ConditionReport rep;
  const std::size_t nb = static_cast<std::size_t>(sys.m1);
  const std::size_t nall = static_cast<std::size_t>(sys.num_vars());
  Polynomial P1 = linear_combination(w.a, sys.F);
  Polynomial P2 = linear_combination(w.a, sys.G);
  if (sys.m2 > 0) P2 += linear_combination(w.b, sys.H);
  bool pos = P1.has_pos() || P2.has_pos();
  rep.exact_identity = P1.is_zero() && P2.is_zero();

  SampleSet bulk_box(plan, nb);
  SampleSet all_box(plan, nall);
  struct Side {
    std::string name;
    const Polynomial* P;
    const SampleSet* box;
  };
  const Side sides[2] = {{"bulk", &P1, &bulk_box}, {"surface", &P2, &all_box}};

  auto certify = [&](double L, double K, std::vector<InequalityCheck>* out) {
    bool ok = true;
    for (const auto& s : sides) {
      Polynomial R = *s.P - total_mass_poly(s.P->num_vars()) * L - Polynomial::constant(s.P->num_vars(), K);
      BoxExtreme e = scan(*s.box, [&](const std::vector<double>& x) { return R.evaluate(x); });
      BoxExtreme scale = scan(*s.box, [&](const std::vector<double>& x) { return s.P->evaluate(x); });
      RayGrowth g = ray_growth(R, all_active(R.num_vars()), plan.rng_seed);
      bool side_ok = (R.is_zero() || e.max <= tolerance(scale.abs_max)) && g.degree < 0.0;
      ok = ok && side_ok;
      if (out) {
        InequalityCheck c;
        c.name = "mass_" + s.name;
        c.verdict = side_ok ? ok_verdict(pos) : Verdict::Fail;
        c.worst_residual = R.is_zero() ? 0.0 : e.max;
        c.worst_point = e.argmax;
        if (!side_ok && g.degree >= 0.0) {
          c.note = "weighted sum exceeds L*mass+K along a ray with growth degree " + format_double(g.degree);
        }
        out->push_back(c);
      }
    }
    return ok;
  };

  if (sys.mass_constants) {
    double L = sys.mass_constants->L, K = sys.mass_constants->K;
    bool ok = certify(L, K, &rep.checks);
    rep.mass_control = ok ? ok_verdict(pos) : Verdict::Fail;
    rep.L = L;
    rep.K = K;
    rep.conservation = ok && L == 0.0 && K == 0.0;
    if (ok && L < 0.0) rep.dissipation_L = L;
    return rep;
  }

  if (rep.exact_identity || certify(0.0, 0.0, nullptr)) {
    certify(0.0, 0.0, &rep.checks);
    rep.mass_control = rep.exact_identity ? Verdict::Pass : ok_verdict(pos);
    rep.L = 0.0;
    rep.K = 0.0;
    rep.conservation = true;
    return rep;
  }

  double L = 0.0;
  bool fittable = true;
  for (const auto& s : sides) {
    RayGrowth g = ray_growth(*s.P, all_active(s.P->num_vars()), plan.rng_seed);
    if (g.degree > 1.0) fittable = false;
    else if (g.degree > 0.0) L = std::max(L, g.slope * (1.0 + 1e-9));
  }
  if (!fittable) {
    certify(0.0, 0.0, &rep.checks);
    rep.mass_control = Verdict::Fail;
    return rep;
  }
  double K = 0.0;
  for (const auto& s : sides) {
    Polynomial R = *s.P - total_mass_poly(s.P->num_vars()) * L;
    BoxExtreme e = scan(*s.box, [&](const std::vector<double>& x) { return R.evaluate(x); });
    K = std::max(K, e.max);
  }
  bool ok = certify(L, K, &rep.checks);
  rep.mass_control = ok ? ok_verdict(pos) : Verdict::Fail;
  rep.L = L;
  rep.K = K;
  for (double Lneg : {-2.0, -1.0, -0.5, -0.25, -0.125}) {
    bool bounded = true;
    double Kneg = 0.0;
    for (const auto& s : sides) {
      Polynomial R = *s.P - total_mass_poly(s.P->num_vars()) * Lneg;
      if (ray_growth(R, all_active(R.num_vars()), plan.rng_seed).degree > 0.0) bounded = false;
      BoxExtreme e = scan(*s.box, [&](const std::vector<double>& x) { return R.evaluate(x); });
      Kneg = std::max(Kneg, e.max);
    }
    if (bounded) {
      rep.dissipation_L = Lneg;
      break;
    }
  }
  return rep;
}

ConditionReport check_polynomial_growth(const ReactionSystem& sys, const SamplingPlan& plan) {
  ConditionReport rep;
  int r = 1;
  bool pos = false;
  for (const auto& p : sys.F) r = std::max(r, p.total_degree()), pos = pos || p.has_pos();
  for (const auto& p : sys.G) r = std::max(r, p.total_degree()), pos = pos || p.has_pos();
  for (const auto& p : sys.H) r = std::max(r, p.total_degree()), pos = pos || p.has_pos();
  SampleSet bulk_box(plan, static_cast<std::size_t>(sys.m1));
  SampleSet all_box(plan, static_cast<std::size_t>(sys.num_vars()));
  double K1 = 0.0;
  auto fit = [&](const Polynomial& P, const SampleSet& box) {
    BoxExtreme e = scan(box, [&](const std::vector<double>& x) {
      return std::fabs(P.evaluate(x)) / (power_sum(x, r) + 1.0);
    });
    K1 = std::max(K1, e.max);
  };
  for (const auto& p : sys.F) fit(p, bulk_box);
  for (const auto& p : sys.G) fit(p, all_box);
  for (const auto& p : sys.H) fit(p, all_box);
  rep.r = r;
  rep.K1 = K1;
  rep.polynomial_growth = ok_verdict(pos);
  return rep;
}

namespace {

struct RowFit {
  double p = 1.0;
  double L2 = 0.0;
  double needed = -1.0;
  bool pos = false;
  std::vector<double> worst_point;
};

RowFit fit_row(const Polynomial& row, const SampleSet& box, std::uint64_t seed) {
  RowFit f;
  f.pos = row.has_pos();
  if (row.is_zero()) return f;
  RayGrowth g = ray_growth(row, all_active(row.num_vars()), seed);
  f.needed = g.degree;
  f.p = std::max(1.0, std::ceil(g.degree * 8.0 - 1e-9) / 8.0);
  BoxExtreme e = scan(box, [&](const std::vector<double>& x) {
    return row.evaluate(x) / (power_sum(x, f.p) + 1.0);
  });
  f.L2 = std::max(0.0, e.max);
  f.worst_point = e.argmax;
  return f;
}

}  // namespace

ConditionReport check_intermediate_sum(const ReactionSystem& sys, const SamplingPlan& plan) {
  if (!sys.A) throw std::invalid_argument("intermediate-sum check needs matrix A");
  const Eigen::MatrixXd& A = *sys.A;
  const int m = sys.num_vars();
  validate_matrix_A(A, m);
  ConditionReport rep;
  SampleSet bulk_box(plan, static_cast<std::size_t>(sys.m1));
  SampleSet all_box(plan, static_cast<std::size_t>(m));
  bool pos = false;
  double L2 = 0.0, p_omega = 1.0, p_M = 1.0, mu_M = 1.0;
  std::vector<Polynomial> GH = sys.G;
  GH.insert(GH.end(), sys.H.begin(), sys.H.end());
  for (int k = 0; k < m; ++k) {
    std::vector<double> coeffs(static_cast<std::size_t>(sys.m1));
    for (int j = 0; j < sys.m1; ++j) coeffs[j] = A(k, j);
    Polynomial row = linear_combination(coeffs, sys.F);
    RowFit f = fit_row(row, bulk_box, plan.rng_seed + k);
    pos = pos || f.pos;
    p_omega = std::max(p_omega, f.p);
    L2 = std::max(L2, f.L2);
    InequalityCheck c;
    c.name = "AF_row" + std::to_string(k + 1);
    c.verdict = ok_verdict(f.pos);
    c.worst_residual = f.L2;
    c.worst_point = f.worst_point;
    c.note = "p=" + format_double(f.p);
    rep.checks.push_back(c);
  }
  for (int k = 0; k < m; ++k) {
    std::vector<double> coeffs(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) coeffs[j] = A(k, j);
    Polynomial row = linear_combination(coeffs, GH);
    RowFit f = fit_row(row, all_box, plan.rng_seed + 1000 + k);
    pos = pos || f.pos;
    if (k < sys.m1) p_M = std::max(p_M, f.p);
    else mu_M = std::max(mu_M, f.p);
    L2 = std::max(L2, f.L2);
    InequalityCheck c;
    c.name = "AGH_row" + std::to_string(k + 1);
    c.verdict = ok_verdict(f.pos);
    c.worst_residual = f.L2;
    c.worst_point = f.worst_point;
    c.note = (k < sys.m1 ? "p_M row, p=" : "mu_M row, p=") + format_double(f.p);
    rep.checks.push_back(c);
  }
  rep.intermediate_sum = std::isfinite(L2) ? ok_verdict(pos) : Verdict::Fail;
  rep.L2 = L2;
  rep.p_omega = p_omega;
  rep.p_M = p_M;
  rep.mu_M = mu_M;
  return rep;
}

ConditionReport check_all(const ReactionSystem& sys, const SamplingPlan& plan) {
  ConditionReport rep = check_quasi_positivity(sys, plan);
  if (sys.mass_weights) rep.merge(check_mass_control(sys, plan));
  rep.merge(check_polynomial_growth(sys, plan));
  if (sys.A) rep.merge(check_intermediate_sum(sys, plan));
  return rep;
}

GRecursion build_g_recursion(const Eigen::MatrixXd& A, int m1) {
  if (m1 < 1) throw std::invalid_argument("m1 must be >= 1");
  if (A.rows() < m1 || A.cols() < m1) throw std::invalid_argument("matrix A is smaller than m1");
  Eigen::MatrixXd block = A.topLeftCorner(m1, m1);
  validate_matrix_A(block, m1);
  GRecursion rec;
  rec.m1 = m1;
  const std::size_t n = static_cast<std::size_t>(m1);
  rec.g.assign(n, std::vector<double>(n, 0.0));
  rec.alpha.assign(n, std::vector<double>(n, 0.0));
  rec.alpha[n - 1][n - 1] = 1.0;
  for (int i = m1 - 2; i >= 0; --i) {
    for (int j = i + 1; j < m1; ++j) {
      for (std::size_t k = 0; k < n; ++k) rec.g[i][k] += A(j, i) * rec.alpha[j][k];
    }
    rec.alpha[i] = rec.g[i];
    for (double& c : rec.alpha[i]) c = -c;
    rec.alpha[i][i] += 1.0;
  }
  rec.g_majorant = rec.g;
  for (auto& row : rec.g_majorant) {
    for (double& c : row) c = std::max(c, 0.0);
  }
  return rec;
}

namespace {

double dot(const std::vector<double>& c, std::span<const double> x) {
  if (x.size() != c.size()) throw std::invalid_argument("argument has wrong length");
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * x[k];
  return s;
}

}  // namespace

double GRecursion::eval_g(int i, std::span<const double> x) const { return dot(g.at(i), x); }
double GRecursion::eval_g_majorant(int i, std::span<const double> x) const { return dot(g_majorant.at(i), x); }
double GRecursion::eval_alpha(int i, std::span<const double> x) const { return dot(alpha.at(i), x); }

EllReport verify_ell_inequality(const ReactionSystem& sys, const GRecursion& rec, std::span<const double> ell,
                                const SamplingPlan& plan, double p_omega, double p_M) {
  if (static_cast<int>(ell.size()) != sys.m1 || rec.m1 != sys.m1) throw std::invalid_argument("ell must have m1 entries");
  for (double l : ell) {
    if (!(l > 0.0)) throw std::invalid_argument("ell must be positive");
  }
  for (int j = 0; j + 1 < sys.m1; ++j) {
    double gj = rec.eval_g(j, ell);
    if (!(ell[j] > gj)) {
      throw std::invalid_argument("ell violates the gap condition at index " + std::to_string(j + 1) + ": ell=" +
                                  format_double(ell[j]) + " <= g=" + format_double(gj));
    }
  }
  EllReport rep;
  for (int i = 0; i < sys.m1; ++i) rep.alpha_hat.push_back(rec.eval_alpha(i, ell));
  std::vector<double> w(ell.begin(), ell.end());
  Polynomial P1 = linear_combination(w, sys.F);
  Polynomial P2 = linear_combination(w, sys.G);
  SampleSet bulk_box(plan, static_cast<std::size_t>(sys.m1));
  SampleSet all_box(plan, static_cast<std::size_t>(sys.num_vars()));
  RayGrowth g1 = ray_growth(P1, all_active(P1.num_vars()), plan.rng_seed);
  RayGrowth g2 = ray_growth(P2, all_active(P2.num_vars()), plan.rng_seed);
  rep.bulk_growth = g1.degree;
  rep.surface_growth = g2.degree;
  BoxExtreme e1 = scan(bulk_box, [&](const std::vector<double>& x) { return P1.evaluate(x) / (power_sum(x, p_omega) + 1.0); });
  BoxExtreme e2 = scan(all_box, [&](const std::vector<double>& x) { return P2.evaluate(x) / (power_sum(x, p_M) + 1.0); });
  rep.L_bulk = std::max(0.0, e1.max);
  rep.L_surface = std::max(0.0, e2.max);
  rep.L_ell = std::max(rep.L_bulk, rep.L_surface);
  rep.worst_residual = std::max(e1.max, e2.max) - rep.L_ell;
  bool ok = g1.degree <= p_omega + 1e-12 && g2.degree <= p_M + 1e-12 && std::isfinite(rep.L_ell);
  rep.verdict = ok ? ok_verdict(P1.has_pos() || P2.has_pos()) : Verdict::Fail;
  return rep;
}

TheoremVerdict classify_theorem(const ReactionSystem& sys, const ConditionReport& report, const TheoremExtras& extras) {
  TheoremVerdict v;
  v.extras = extras;
  const double n = sys.n;
  const double eps = 1e-12;
  bool structural = true;
  auto need = [&](Verdict verdict, const std::string& what) {
    if (!passes(verdict)) {
      structural = false;
      v.reasons.push_back(what + " " + to_string(verdict));
    }
  };
  need(report.quasi_positivity, "quasi-positivity");
  need(report.mass_control, "mass control");
  need(report.polynomial_growth, "polynomial growth");
  bool certificate = passes(report.intermediate_sum) && report.p_omega && report.p_M && report.mu_M;
  if (!certificate) v.reasons.push_back("no intermediate-sum certificate");
  double po = report.p_omega.value_or(INFINITY);
  double pm = report.p_M.value_or(INFINITY);
  double mu = report.mu_M.value_or(INFINITY);

  bool gates11 = po < 1.0 + 2.0 / n && pm < 1.0 + 1.0 / n && mu <= 1.0 + 4.0 / (n + 1.0) + eps;
  if (certificate && !gates11) v.reasons.push_back("exponent gates of theorem 1.1 violated");
  v.theorem_1_1 = structural && certificate && gates11;
  v.uniform_in_time = v.theorem_1_1 && report.uniform_in_time();

  if (extras.lambda) {
    double lam = *extras.lambda;
    bool ok = structural && certificate && lam > 1.0 && po < 1.0 + 2.0 / n && pm < 1.0 + 1.0 / n &&
              mu <= 1.0 + 2.0 * lam / (n + 1.0) + eps;
    std::optional<double> cmr = extras.cmr;
    if (!cmr && std::fabs(lam - 2.0) < eps) cmr = 1.0;
    if (!cmr) {
      ok = false;
      v.reasons.push_back("maximal regularity constant unknown for this lambda");
    } else if (sys.m2 > 0) {
      auto [mn, mx] = std::minmax_element(sys.delta.begin(), sys.delta.end());
      double ratio = (*mx - *mn) / (*mx + *mn);
      if (!(ratio * *cmr < 1.0)) {
        ok = false;
        v.reasons.push_back("surface diffusion not quasi-uniform");
      }
    }
    v.theorem_1_2 = ok;
  }
  if (extras.a && extras.b) {
    double a = *extras.a, b = *extras.b;
    bool ok = certificate && a >= 1.0 && b >= 1.0 && po < 1.0 + a * std::min(2.0 / n, 3.0 / (n + 2.0)) &&
              pm < 1.0 + a / n && mu < 1.0 + 2.0 * b / (n + 1.0);
    v.theorem_1_3 = ok;
  }
  return v;
}

std::string TheoremVerdict::summary() const {
  std::ostringstream os;
  if (theorem_1_1) {
    os << "theorem=1.1 uniform_in_time=" << (uniform_in_time ? "true" : "false");
    return os.str();
  }
  os << "theorem_1_1=fail";
  if (theorem_1_2) os << " theorem_1_2=" << (*theorem_1_2 ? "pass" : "fail") << "(lambda=" << format_double(*extras.lambda) << ")";
  if (theorem_1_3) {
    os << " theorem_1_3=" << (*theorem_1_3 ? "pass" : "fail") << "(a=" << format_double(*extras.a)
       << ",b=" << format_double(*extras.b) << ")";
  }
  return os.str();
}

}  // namespace bulksurf
