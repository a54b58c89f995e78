#include "bulksurf/models.hpp"

#include <stdexcept>

namespace bulksurf {

namespace {

Eigen::MatrixXd all_ones_lower(int m) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) A(i, j) = 1.0;
  }
  return A;
}

SimSettings default_sim() {
  SimSettings s;
  s.dt = 1e-3;
  s.t_end = 10.0;
  s.nr = 16;
  s.ntheta = 64;
  s.R = 1.0;
  s.record_every = 100;
  return s;
}

void default_ic(ModelSpec& spec) {
  spec.ic_u.assign(spec.m1, "1");
  spec.ic_v.assign(spec.m2, "0.1 + 0.05*cos(theta)");
}

ModelPreset finish(std::string name, std::string description, ModelSpec spec, ExpectedHighlights expected) {
  ModelPreset p;
  p.name = std::move(name);
  p.description = std::move(description);
  p.system = spec.build();
  p.spec = std::move(spec);
  p.expected = std::move(expected);
  return p;
}

std::string v(int j) { return "v" + std::to_string(j); }
std::string k(int j) { return "k" + std::to_string(j); }

}  // namespace

ModelPreset membrane_clustering(int N, const MembraneRates& rates) {
  if (N < 2) throw std::invalid_argument("membrane clustering needs N >= 2");
  std::vector<double> kj = rates.k.empty() ? std::vector<double>(N - 1, 1.0) : rates.k;
  if (static_cast<int>(kj.size()) != N - 1) throw std::invalid_argument("membrane clustering needs rates k2..kN");
  for (double r : {rates.k0, rates.kb, rates.kd, rates.km, rates.kg}) {
    if (!(r > 0.0)) throw std::invalid_argument("membrane clustering rates must be positive");
  }
  for (double r : kj) {
    if (!(r > 0.0)) throw std::invalid_argument("membrane clustering rates must be positive");
  }

  ModelSpec s;
  s.n = 3;
  s.m1 = 1;
  s.m2 = N;
  s.d = {1.0};
  s.delta.assign(N, 1.0);
  s.bulk_names = {"u"};
  for (int j = 1; j <= N; ++j) s.surface_names.push_back(v(j));
  s.params = {{"k0", rates.k0}, {"kb", rates.kb}, {"kd", rates.kd}, {"km", rates.km}, {"kg", rates.kg}};
  for (int j = 2; j <= N; ++j) s.params.emplace_back(k(j), kj[j - 2]);

  const std::string vN = v(N);
  s.F = {"0"};
  s.G = {"-(k0 + kb*" + vN + ")*u + kd*v1"};

  std::string h1 = "(k0 + kb*" + vN + ")*u - kd*v1 - 2*km*v1^2 + 2*k2*v2";
  if (N >= 3) {
    std::string cluster_sum;
    for (int l = 2; l <= N - 1; ++l) cluster_sum += (l > 2 ? " + " : "") + v(l);
    h1 += " - kg*v1*(" + cluster_sum + ")";
    for (int j = 3; j <= N; ++j) h1 += " + " + k(j) + "*" + v(j);
  }
  s.H.push_back(h1);
  if (N == 2) {
    s.H.push_back("km*v1^2 - k2*v2");
  } else {
    s.H.push_back("km*v1^2 - kg*v1*v2 - k2*v2 + k3*v3");
    for (int j = 3; j <= N - 1; ++j) {
      s.H.push_back("kg*v1*" + v(j - 1) + " - kg*v1*" + v(j) + " - " + k(j) + "*" + v(j) + " + " + k(j + 1) + "*" +
                    v(j + 1));
    }
    s.H.push_back("kg*v1*" + v(N - 1) + " - " + k(N) + "*" + vN);
  }

  s.A = all_ones_lower(N + 1);
  MassWeights w;
  w.a = {1.0};
  for (int j = 1; j <= N; ++j) w.b.push_back(j);
  s.mass_weights = w;
  default_ic(s);
  s.sim = default_sim();

  ExpectedHighlights e;
  e.p_omega = 1.0;
  e.p_M = 1.0;
  e.mu_M = 1.0;
  e.conservation = true;
  e.theorem_summary = "theorem=1.1 uniform_in_time=true";
  return finish("membrane", "membrane protein clustering, N = " + std::to_string(N) + " cluster sizes", std::move(s), e);
}

ModelPreset cdc42(const Cdc42Rates& r, const Cdc42Diffusion& D) {
  for (double x : {r.k1, r.km1, r.k2, r.km2, r.k3, r.kmax, D.DG, D.DI, D.DA}) {
    if (!(x > 0.0)) throw std::invalid_argument("cdc42 rates and diffusivities must be positive");
  }
  ModelSpec s;
  s.n = 3;
  s.m1 = 1;
  s.m2 = 2;
  s.d = {D.DG};
  s.delta = {D.DI, D.DA};
  s.bulk_names = {"G"};
  s.surface_names = {"I", "A"};
  s.params = {{"k1", r.k1}, {"km1", r.km1}, {"k2", r.k2}, {"km2", r.km2}, {"k3", r.k3}, {"kmax", r.kmax}};
  s.F = {"0"};
  s.G = {"-k1*G*pos(kmax - (A + I)) + km1*I"};
  s.H = {"k1*G*pos(kmax - (A + I)) - km1*I - (k2*I - km2*A + k3*A^2*I)", "k2*I - km2*A + k3*A^2*I"};
  s.A = all_ones_lower(3);
  s.mass_weights = MassWeights{{1.0}, {1.0, 1.0}};
  default_ic(s);
  s.sim = default_sim();

  ExpectedHighlights e;
  e.p_omega = 1.0;
  e.p_M = 1.0;
  e.mu_M = 1.0;
  e.conservation = true;
  e.theorem_summary = "theorem=1.1 uniform_in_time=true";
  return finish("cdc42", "Cdc42 activation with saturating membrane recruitment", std::move(s), e);
}

ModelPreset cubic_example() {
  ModelSpec s;
  s.n = 3;
  s.m1 = 2;
  s.m2 = 2;
  s.d = {1.0, 1.0};
  s.delta = {1.0, 1.0};
  s.F = {"u1^3 - u2^3", "u2^3 - u1^3"};
  s.G = {"u1 - u2 - 2*u1^3 + u2^2 - v2^2", "-u1 + u2 - u2^3 - v1^2"};
  s.H = {"2*u1^3 + u1*u2^2 - v2^6", "2*u2^3 + u1^3 - v1^6"};
  s.A = all_ones_lower(4);
  s.mass_weights = MassWeights{{2.0, 2.0}, {1.0, 1.0}};
  s.theorem.a = 4.0;
  s.theorem.b = 6.0;
  default_ic(s);
  SimSettings sim = default_sim();
  sim.lp_orders = {2, 4};
  s.sim = sim;

  ExpectedHighlights e;
  e.p_omega = 3.0;
  e.p_M = 2.0;
  e.mu_M = 3.0;
  e.conservation = false;
  e.theorem_summary = "theorem_1_1=fail theorem_1_3=pass(a=4,b=6)";
  return finish("cubic", "cubic bulk exchange with sixth-order surface damping", std::move(s), e);
}

ModelPreset blowup_toy() {
  ModelSpec s;
  s.n = 2;
  s.m1 = 1;
  s.m2 = 0;
  s.d = {1.0};
  s.F = {"0"};
  s.G = {"u1^2"};
  s.ic_u = {"1"};
  SimSettings sim = default_sim();
  sim.t_end = 5.0;
  sim.record_every = 10;
  sim.blowup_threshold = 1e6;
  s.sim = sim;
  ExpectedHighlights e;
  e.theorem_summary = "theorem_1_1=fail";
  return finish("blowup_toy", "quadratic boundary influx, finite-time blow-up", std::move(s), e);
}

ModelPreset linear_decay() {
  ModelSpec s;
  s.n = 2;
  s.m1 = 1;
  s.m2 = 0;
  s.d = {1.0};
  s.F = {"-u1"};
  s.G = {"0"};
  s.A = all_ones_lower(1);
  s.mass_weights = MassWeights{{1.0}, {}};
  s.ic_u = {"1"};
  SimSettings sim = default_sim();
  sim.t_end = 1.0;
  sim.record_every = 10;
  s.sim = sim;
  ExpectedHighlights e;
  e.p_omega = 1.0;
  e.p_M = 1.0;
  e.mu_M = 1.0;
  e.theorem_summary = "theorem=1.1 uniform_in_time=true";
  return finish("linear_decay", "first-order decay in the bulk, no flux", std::move(s), e);
}

namespace {

ModelSpec remark24_spec() {
  ModelSpec s;
  s.n = 3;
  s.m1 = 2;
  s.m2 = 0;
  s.d = {1.0, 1.0};
  s.F = {"u1*u2^3 - u1^4", "u1^4 - u1*u2^4"};
  s.G = {"0", "0"};
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.0, 1.0, 1.0;
  s.A = A;
  s.ic_u = {"1", "1"};
  s.sim = default_sim();
  return s;
}

}  // namespace

Remark24Pair remark24_pair() {
  Remark24Pair r;
  r.system = remark24_spec().build();
  r.F1 = r.system.F[0];
  r.F2 = r.system.F[1];
  r.ell = {2.0, 1.0};
  return r;
}

ModelPreset remark24_preset() {
  ExpectedHighlights e;
  e.theorem_summary = "theorem_1_1=fail";
  return finish("remark24", "two-species pair without an intermediate-sum bound but with an ell-weighted one",
                remark24_spec(), e);
}

std::vector<std::string> preset_names() { return {"membrane", "cdc42", "cubic", "remark24", "blowup_toy", "linear_decay"}; }

ModelPreset make_preset(const std::string& name) {
  if (name == "membrane") return membrane_clustering();
  if (name == "cdc42") return cdc42();
  if (name == "cubic") return cubic_example();
  if (name == "remark24") return remark24_preset();
  if (name == "blowup_toy") return blowup_toy();
  if (name == "linear_decay") return linear_decay();
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace bulksurf
