// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion K   run criterion K only

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bulksurf/cli.hpp"
#include "bulksurf/conditions.hpp"
#include "bulksurf/energy.hpp"
#include "bulksurf/format.hpp"
#include "bulksurf/model_file.hpp"
#include "bulksurf/models.hpp"
#include "bulksurf/solver.hpp"
#include "bulksurf/verification.hpp"

using namespace bulksurf;
namespace fs = std::filesystem;

namespace {

const double kPi = std::acos(-1.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) { return format_double(x); }

Outcome from_suites(const std::vector<SuiteResult>& suites) {
  Outcome o{true, ""};
  for (const auto& s : suites) {
    o.pass = o.pass && s.passed;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += s.suite + " max_residual=" + fmt(s.max_residual) + " tol=" + fmt(s.tolerance);
    if (!s.detail.empty()) o.detail += " " + s.detail;
  }
  return o;
}

// ---- 1-3, 9: identity suites ----------------------------------------------

Outcome criterion_1() { return from_suites({verify_multinomial(1, 1000)}); }
Outcome criterion_2() { return from_suites({verify_lemma_a1(2, 200)}); }
Outcome criterion_3() { return from_suites({verify_lemma_a2(3, 200), verify_positive_definite(3, 1000)}); }
Outcome criterion_9() { return from_suites({verify_mr(9, 100, 128, 5e-4, 1.0)}); }

// ---- 4: theta selection ---------------------------------------------------

// g_j as coefficient vectors: alpha_m = x_m, g_i = sum_{j>i} a_ji alpha_j, alpha_i = x_i - g_i.
std::vector<std::vector<double>> g_forms(const Eigen::MatrixXd& A, int m) {
  std::vector<std::vector<double>> alpha(m, std::vector<double>(m, 0.0)), g(m, std::vector<double>(m, 0.0));
  for (int i = m - 1; i >= 0; --i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = 0; k < m; ++k) g[i][k] += A(j, i) * alpha[j][k];
    }
    for (int k = 0; k < m; ++k) alpha[i][k] = (k == i ? 1.0 : 0.0) - g[i][k];
  }
  return g;
}

// Checks theta_j > g_j(theta_{j+1}^{i_1}, ..., theta_m^{i_{m-j}}) for all i_k in 1..2p-1.
bool theta_gaps_hold(const std::vector<std::vector<double>>& g, const std::vector<double>& theta, int p,
                     double* worst_margin) {
  const int m = static_cast<int>(theta.size());
  bool ok = true;
  for (int j = 0; j + 1 < m; ++j) {
    const int tail = m - j - 1;
    std::vector<int> pw(tail, 1);
    while (true) {
      double val = 0.0;
      for (int k = 0; k < tail; ++k) val += g[j][j + 1 + k] * std::pow(theta[j + 1 + k], pw[k]);
      double margin = theta[j] - val;
      *worst_margin = std::min(*worst_margin, margin);
      if (!(margin > 0.0)) ok = false;
      int pos = 0;
      while (pos < tail && ++pw[pos] > 2 * p - 1) pw[pos++] = 1;
      if (pos == tail) break;
    }
  }
  return ok;
}

bool sdd(const std::vector<double>& d, const std::vector<double>& theta) {
  const std::size_t m = d.size();
  for (std::size_t i = 0; i < m; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) off += 0.5 * (d[i] + d[j]);
    }
    if (!(d[i] * theta[i] * theta[i] > off)) return false;
  }
  return true;
}

Outcome criterion_4() {
  struct Case {
    std::string label;
    ReactionSystem sys;
  };
  std::vector<Case> cases;
  for (const auto& name : {"membrane", "cdc42", "cubic"}) cases.push_back({name, make_preset(name).system});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> entry(0.0, 2.0), diff(0.2, 2.0);
  for (int k = 0; k < 50; ++k) {
    const int m = 1 + k % 4;
    ReactionSystem sys;
    sys.n = 2;
    sys.m1 = m;
    for (int i = 0; i < m; ++i) {
      sys.d.push_back(diff(rng));
      sys.F.push_back(Polynomial(static_cast<std::size_t>(m)));
      sys.G.push_back(Polynomial(static_cast<std::size_t>(m)));
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < i; ++j) A(i, j) = entry(rng);
    }
    sys.A = A;
    sys.validate();
    cases.push_back({"random" + std::to_string(k), sys});
  }
  Outcome o{true, ""};
  int checked = 0;
  double worst = INFINITY;
  for (const auto& c : cases) {
    const int m = c.sys.m1;
    GRecursion rec = build_g_recursion(*c.sys.A, m);
    auto g = g_forms(c.sys.A->topLeftCorner(m, m), m);
    for (int p : {2, 3, 4}) {
      std::vector<double> theta = select_theta(c.sys, rec, p);
      bool ok = sdd(c.sys.d, theta) && strictly_diagonally_dominant(script_m_matrix(c.sys.d, theta));
      ok = theta_gaps_hold(g, theta, p, &worst) && ok;
      ++checked;
      if (!ok) {
        o.pass = false;
        o.detail += c.label + "(p=" + std::to_string(p) + ") ";
      }
    }
  }
  o.detail = std::to_string(checked) + " selections, min gap margin " + fmt(worst) +
             (o.detail.empty() ? "" : ", failing: " + o.detail);
  return o;
}

// ---- 5: structural checks -------------------------------------------------

Outcome criterion_5() {
  Outcome o{true, ""};
  std::ostringstream d;

  ModelPreset mem = membrane_clustering(3);
  std::vector<Polynomial> parts = {mem.system.G[0], mem.system.H[0], mem.system.H[1], mem.system.H[2]};
  bool mem_zero = linear_combination(std::vector<double>{1, 1, 2, 3}, parts).is_zero();
  d << "membrane weighted sum zero=" << (mem_zero ? "yes" : "no");
  o.pass = o.pass && mem_zero;

  ModelPreset cdc = cdc42();
  Polynomial qfh = cdc.system.G[0] + cdc.system.H[0] + cdc.system.H[1];
  bool cdc_zero = qfh.is_zero();
  d << "; cdc42 Q+F+H zero=" << (cdc_zero ? "yes" : "no");
  o.pass = o.pass && cdc_zero;

  // 2 g1 + 2 g2 + h1 + h2 on [0,10]^4, tensor grid of 11 points per axis.
  ModelPreset cub = cubic_example();
  const auto& s = cub.system;
  double worst = -INFINITY;
  std::vector<double> arg;
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; b <= 10; ++b) {
      for (int c = 0; c <= 10; ++c) {
        for (int e = 0; e <= 10; ++e) {
          std::vector<double> x = {double(a), double(b), double(c), double(e)};
          double v = 2 * s.G[0].evaluate(x) + 2 * s.G[1].evaluate(x) + s.H[0].evaluate(x) + s.H[1].evaluate(x);
          if (v > worst) worst = v, arg = x;
        }
      }
    }
  }
  bool cubic_ok = worst <= 1e-9;
  d << "; cubic max(2g1+2g2+h1+h2)=" << fmt(worst) << " at (" << fmt(arg[0]) << "," << fmt(arg[1]) << ","
    << fmt(arg[2]) << "," << fmt(arg[3]) << ")";
  o.pass = o.pass && cubic_ok;

  const std::vector<std::pair<ModelPreset*, std::array<double, 3>>> expected = {
      {&mem, {1, 1, 1}}, {&cdc, {1, 1, 1}}, {&cub, {3, 2, 3}}};
  for (const auto& [p, e] : expected) {
    ConditionReport r = check_intermediate_sum(p->system);
    bool ok = passes(r.intermediate_sum) && r.p_omega && *r.p_omega == e[0] && *r.p_M == e[1] && *r.mu_M == e[2];
    d << "; " << p->name << " exponents (" << fmt(r.p_omega.value_or(NAN)) << "," << fmt(r.p_M.value_or(NAN)) << ","
      << fmt(r.mu_M.value_or(NAN)) << ")";
    o.pass = o.pass && ok;
  }
  o.detail = d.str();
  return o;
}

// ---- 6: classifier --------------------------------------------------------

Outcome criterion_6() {
  ModelPreset mem = membrane_clustering(3);
  ModelPreset cub = cubic_example();
  std::string a = classify_theorem(mem.system, check_all(mem.system)).summary();
  TheoremExtras ab;
  ab.a = 4.0;
  ab.b = 6.0;
  std::string b = classify_theorem(cub.system, check_all(cub.system), ab).summary();
  bool ok = a == "theorem=1.1 uniform_in_time=true" && b == "theorem_1_1=fail theorem_1_3=pass(a=4,b=6)";
  return {ok, "membrane: " + a + "; cubic: " + b};
}

// ---- 7, 8, 10: simulations ------------------------------------------------

struct Run {
  Trajectory traj;
  double seconds = 0.0;
};

Run simulate(const ModelPreset& p, double t_end, int record_every, bool snapshots = false) {
  SimSettings sim = *p.spec.sim;
  sim.t_end = t_end;
  sim.record_every = record_every;
  SimMeshes meshes = sim.meshes(p.system.n);
  DiskState s0 = initial_state(p.system, meshes, p.spec.initial_data());
  auto t0 = std::chrono::steady_clock::now();
  Run r;
  r.traj = run_simulation(p.system, s0, sim.config(), meshes, snapshots);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Outcome criterion_7() {
  Outcome o{true, ""};
  for (const auto& name : {"membrane", "cdc42"}) {
    ModelPreset p = make_preset(name);
    Run r = simulate(p, 10.0, 100);
    double m0 = r.traj.records.front().mass, drift = 0.0;
    long posviol = 0;
    for (const auto& rec : r.traj.records) {
      drift = std::max(drift, std::fabs(rec.mass - m0) / m0);
      posviol = std::max(posviol, rec.posviol);
    }
    bool ok = !r.traj.blowup && drift <= 1e-5 && posviol == 0 && r.seconds < 120.0;
    o.pass = o.pass && ok;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + name + " drift=" + fmt(drift) +
                " posviol=" + std::to_string(posviol) + " time=" + fmt(std::round(r.seconds * 10) / 10) + "s";
  }
  return o;
}

Outcome criterion_8() {
  Outcome o{true, ""};
  for (const auto& name : {"membrane", "cdc42", "linear_decay"}) {
    ModelPreset p = make_preset(name);
    Run r = simulate(p, 2.0, 50, true);
    double minimum = INFINITY;
    for (const auto& s : r.traj.snapshots) {
      for (const auto* fields : {&s.u, &s.v}) {
        for (const auto& f : *fields) minimum = std::min(minimum, *std::min_element(f.begin(), f.end()));
      }
    }
    long posviol = r.traj.records.back().posviol;
    bool ok = minimum >= 0.0 && posviol == 0;
    o.pass = o.pass && ok;
    o.detail += name + std::string(" min=") + fmt(minimum) + " posviol=" + std::to_string(posviol) + "; ";
  }

  fs::path dir = fs::temp_directory_path() / "bulksurf_acceptance_blowup";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string model = (dir / "blowup_toy.model").string(), csv = (dir / "out.csv").string();
  std::ostringstream out, err;
  const char* exp_args[] = {"bulksurf", "models", "export", "blowup_toy", "--out", model.c_str()};
  int code = cli::run(6, exp_args, out, err);
  const char* sim_args[] = {"bulksurf", "simulate", "--config", model.c_str(), "--out", csv.c_str()};
  if (code == 0) code = cli::run(6, sim_args, out, err);
  double t_last = NAN;
  {
    std::ifstream in(csv);
    std::string line, last;
    while (std::getline(in, line)) last = line;
    if (!last.empty()) t_last = std::strtod(last.c_str(), nullptr);
  }
  fs::remove_all(dir);
  bool blow = code == cli::kExitBlowup && t_last < 5.0;
  o.pass = o.pass && blow;
  o.detail += "blowup_toy exit=" + std::to_string(code) + " t=" + fmt(t_last);
  return o;
}

double ls_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < t.size(); ++k) st += t[k], sy += y[k], stt += t[k] * t[k], sty += t[k] * y[k];
  return (n * sty - st * sy) / (n * stt - st * st);
}

Outcome criterion_10() {
  ModelPreset p = membrane_clustering(3);
  Run r = simulate(p, 100.0, 100);
  if (r.traj.blowup) return {false, "blow-up at t=" + fmt(r.traj.t_blowup)};
  std::vector<double> t;
  std::vector<std::vector<double>> cols(1 + p.system.m2);
  for (const auto& rec : r.traj.records) {
    if (rec.t < 50.0 - 1e-9) continue;
    t.push_back(rec.t);
    cols[0].push_back(rec.sup_u[0]);
    for (int j = 0; j < p.system.m2; ++j) cols[1 + j].push_back(rec.sup_v[j]);
  }
  double worst = -INFINITY;
  for (const auto& c : cols) worst = std::max(worst, ls_slope(t, c));
  return {worst <= 1e-4, "max sup-norm slope over [50,100]=" + fmt(worst) + " (" + std::to_string(t.size()) +
                             " records, " + fmt(std::round(r.seconds)) + "s)"};
}

// ---- 11: spatial convergence ----------------------------------------------

ReactionSystem diffusion_only(int n, int m2, double d, double delta) {
  ReactionSystem sys;
  sys.n = n;
  sys.m1 = 1;
  sys.m2 = m2;
  sys.d = {d};
  const std::size_t all = static_cast<std::size_t>(1 + m2);
  sys.F = {Polynomial(1)};
  sys.G = {Polynomial(all)};
  for (int j = 0; j < m2; ++j) {
    sys.delta.push_back(delta);
    sys.H.push_back(Polynomial(all));
  }
  sys.validate();
  return sys;
}

DiskState march(const ReactionSystem& sys, const SimMeshes& meshes, DiskState s, double dt, double T);

// Advances with fixed dt to T and returns the field.
DiskState march(const ReactionSystem& sys, const SimMeshes& meshes, const InitialData& ic, double dt, double T) {
  DiskState s = initial_state(sys, meshes, ic);
  return march(sys, meshes, std::move(s), dt, T);
}

// dt is shrunk so that a whole number of steps lands on T.
DiskState march(const ReactionSystem& sys, const SimMeshes& meshes, DiskState s, double dt, double T) {
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  SimConfig cfg;
  cfg.dt = T / static_cast<double>(steps);
  cfg.t_end = T;
  Simulator sim(sys, meshes, cfg);
  for (long k = 0; k < steps; ++k) sim.step(s, cfg.dt);
  return s;
}

double order(const std::vector<double>& e) {
  double worst = INFINITY;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) worst = std::min(worst, std::log2(e[k] / e[k + 1]));
  return worst;
}

Outcome criterion_11() {
  std::ostringstream d;
  bool pass = true;

  // Interval [0, 1]: 1 + cos(pi x) decays as e^{-pi^2 t}.
  {
    const double T = 0.05;
    ReactionSystem sys = diffusion_only(1, 0, 1.0, 0.0);
    std::vector<double> err;
    for (int nx : {16, 32, 64}) {
      const double h = 1.0 / nx;
      SimMeshes meshes = make_interval_meshes(nx, 1.0);
      InitialData ic{{"1 + cos(pi*x)"}, {}, {{"pi", kPi}}};
      DiskState s = march(sys, meshes, ic, 0.25 * h * h, T);
      double e2 = 0.0;
      for (std::size_t c = 0; c < meshes.bulk.size(); ++c) {
        double exact = 1.0 + std::exp(-kPi * kPi * T) * std::cos(kPi * meshes.bulk.x[c]);
        e2 += meshes.bulk.volume[c] * std::pow(s.u[0][c] - exact, 2);
      }
      err.push_back(std::sqrt(e2));
    }
    double q = order(err);
    pass = pass && q >= 1.8;
    d << "interval order=" << fmt(std::round(q * 100) / 100);
  }

  // Unit disk: 1 + J0(j r) with J0'(j) = 0, j = 3.8317..., decays as e^{-j^2 t}.
  {
    const double j1 = 3.831705970207512, T = 0.02;
    ReactionSystem sys = diffusion_only(2, 0, 1.0, 0.0);
    std::vector<double> err;
    for (int nr : {8, 16, 32}) {
      const double h = 1.0 / nr;
      SimMeshes meshes = make_disk_meshes(nr, 4 * nr, 1.0);
      InitialData ic{{"1"}, {}, {}};
      DiskState s0 = initial_state(sys, meshes, ic);
      for (std::size_t c = 0; c < meshes.bulk.size(); ++c) s0.u[0][c] = 1.0 + std::cyl_bessel_j(0.0, j1 * meshes.bulk.r[c]);
      s0 = march(sys, meshes, std::move(s0), 0.25 * h * h, T);
      double e2 = 0.0;
      for (std::size_t c = 0; c < meshes.bulk.size(); ++c) {
        double exact = 1.0 + std::exp(-j1 * j1 * T) * std::cyl_bessel_j(0.0, j1 * meshes.bulk.r[c]);
        e2 += meshes.bulk.volume[c] * std::pow(s0.u[0][c] - exact, 2);
      }
      err.push_back(std::sqrt(e2));
    }
    double q = order(err);
    pass = pass && q >= 1.8;
    d << "; disk order=" << fmt(std::round(q * 100) / 100);
  }

  // Unit circle: 1 + cos(2 theta) decays as e^{-4 t}.
  {
    const double T = 0.1;
    ReactionSystem sys = diffusion_only(2, 1, 1.0, 1.0);
    std::vector<double> err;
    for (int nt : {16, 32, 64}) {
      SimMeshes meshes = make_disk_meshes(3, nt, 1.0);
      const double h = meshes.circle->h;
      InitialData ic{{"0"}, {"1 + cos(2*theta)"}, {}};
      DiskState s = march(sys, meshes, ic, 0.25 * h * h, T);
      double e2 = 0.0;
      for (std::size_t k = 0; k < meshes.circle->size(); ++k) {
        double exact = 1.0 + std::exp(-4.0 * T) * std::cos(2.0 * meshes.circle->theta[k]);
        e2 += h * std::pow(s.v[0][k] - exact, 2);
      }
      err.push_back(std::sqrt(e2));
    }
    double q = order(err);
    pass = pass && q >= 1.8;
    d << "; circle order=" << fmt(std::round(q * 100) / 100);
  }
  return {pass, d.str()};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list = {
      {"multinomial identity", criterion_1},
      {"time-derivative identity", criterion_2},
      {"gradient quadratic form identity and positivity", criterion_3},
      {"theta selection", criterion_4},
      {"structural checks on presets", criterion_5},
      {"theorem classifier regression", criterion_6},
      {"simulation conservation", criterion_7},
      {"non-negativity and blow-up exit code", criterion_8},
      {"maximal regularity probe", criterion_9},
      {"long-horizon boundedness", criterion_10},
      {"spatial convergence", criterion_11},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int k = 1; k < argc; ++k) {
    std::string a = argv[k];
    if (a == "--criterion" && k + 1 < argc) {
      which.push_back(std::atoi(argv[++k]));
    } else {
      std::cerr << "usage: acceptance [--criterion K]\n";
      return 2;
    }
  }
  const auto& list = criteria();
  if (which.empty()) {
    for (int k = 1; k <= static_cast<int>(list.size()); ++k) which.push_back(k);
  }
  bool all = true;
  for (int k : which) {
    if (k < 1 || k > static_cast<int>(list.size())) {
      std::cerr << "no criterion " << k << '\n';
      return 2;
    }
    const auto& [name, fn] = list[k - 1];
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << name << "): " << o.detail << " ["
              << fmt(std::round(secs * 100) / 100) << "s]" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
