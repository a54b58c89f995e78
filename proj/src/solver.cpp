#include "bulksurf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "bulksurf/format.hpp"

namespace bulksurf {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Ldlt = Eigen::SimplicialLDLT<SparseMatrix>;

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("blowup threshold must be positive");
  if (theta_imex != 1.0) throw std::invalid_argument("only backward Euler diffusion (theta_imex = 1) is supported");
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be >= 0");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  for (int p : lp_orders) {
    if (p < 1) throw std::invalid_argument("L^p orders must be >= 1");
  }
}

SimMeshes make_disk_meshes(int nr, int ntheta, double R) {
  return {build_disk_mesh(nr, ntheta, R), build_circle_mesh(ntheta, R)};
}

SimMeshes make_interval_meshes(int nx, double length) { return {build_interval_mesh(nx, length), std::nullopt}; }

namespace {

void check_compatible(const ReactionSystem& sys, const SimMeshes& meshes) {
  if (meshes.bulk.kind == BulkMesh::Kind::Interval && sys.m2 > 0) {
    throw std::invalid_argument("the interval geometry carries no surface species (m2 must be 0)");
  }
  if (sys.m2 > 0 && !meshes.circle) throw std::invalid_argument("surface species need a circle mesh");
}

std::vector<std::string> ic_inputs() { return {"x", "y", "r", "theta"}; }

}  // namespace

DiskState initial_state(const ReactionSystem& sys, const SimMeshes& meshes, const InitialData& ic) {
  check_compatible(sys, meshes);
  std::vector<std::string> u_text = ic.u, v_text = ic.v;
  if (u_text.empty()) u_text.assign(static_cast<std::size_t>(sys.m1), "1");
  if (v_text.empty()) v_text.assign(static_cast<std::size_t>(sys.m2), "0.1");
  if (static_cast<int>(u_text.size()) != sys.m1 || static_cast<int>(v_text.size()) != sys.m2) {
    throw std::invalid_argument("initial data needs one expression per species");
  }
  DiskState s;
  const BulkMesh& b = meshes.bulk;
  for (const auto& text : u_text) {
    ScalarExpr e(text, ic_inputs(), ic.parameters);
    std::vector<double> f(b.size());
    for (std::size_t c = 0; c < b.size(); ++c) f[c] = e({b.x[c], b.y[c], b.r[c], b.theta[c]});
    s.u.push_back(std::move(f));
  }
  for (const auto& text : v_text) {
    ScalarExpr e(text, ic_inputs(), ic.parameters);
    const CircleMesh& c = *meshes.circle;
    std::vector<double> f(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      double th = c.theta[k];
      f[k] = e({c.R * std::cos(th), c.R * std::sin(th), c.R, th});
    }
    s.v.push_back(std::move(f));
  }
  for (const auto& f : s.u) {
    for (double x : f) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("initial data must be finite and non-negative");
    }
  }
  for (const auto& f : s.v) {
    for (double x : f) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("initial data must be finite and non-negative");
    }
  }
  return s;
}

BlowupDetected::BlowupDetected(double t)
    : std::runtime_error("blow-up detected at t=" + format_double(t)), t_(t) {}

std::vector<EnergyConfig> energy_configs(const ReactionSystem& sys, const std::vector<int>& lp_orders) {
  std::vector<EnergyConfig> out;
  Eigen::MatrixXd A = sys.A ? *sys.A : Eigen::MatrixXd::Identity(sys.num_vars(), sys.num_vars());
  std::optional<GRecursion> rec;
  if (sys.m1 <= kMaxEnergySpecies) rec = build_g_recursion(A, sys.m1);
  for (int p : lp_orders) {
    EnergyConfig cfg;
    cfg.p = p;
    if (rec && p >= 2 && p <= kMaxEnergyOrder) {
      try {
        cfg.theta = select_theta(sys, *rec, p);
      } catch (const std::overflow_error&) {
        cfg.theta.clear();
      }
    }
    out.push_back(cfg);
  }
  return out;
}

DiagnosticsRecord compute_diagnostics(const DiskState& state, const ReactionSystem& sys, const SimMeshes& meshes,
                                      const std::vector<int>& lp_orders, const std::vector<EnergyConfig>& energy,
                                      const std::vector<double>& bint, long halvings, long posviol) {
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.halvings = halvings;
  rec.posviol = posviol;
  const BulkMesh& b = meshes.bulk;
  std::vector<double> a(static_cast<std::size_t>(sys.m1), 1.0), w(static_cast<std::size_t>(sys.m2), 1.0);
  if (sys.mass_weights) {
    a = sys.mass_weights->a;
    w = sys.mass_weights->b;
  }
  rec.lp_u.assign(lp_orders.size(), {});
  rec.lp_v.assign(lp_orders.size(), {});
  for (int i = 0; i < sys.m1; ++i) {
    const auto& f = state.u[i];
    double l1 = 0.0, sup = 0.0, integral = 0.0;
    for (std::size_t c = 0; c < b.size(); ++c) {
      l1 += b.volume[c] * std::fabs(f[c]);
      integral += b.volume[c] * f[c];
      sup = std::max(sup, std::fabs(f[c]));
    }
    rec.mass += a[i] * integral;
    rec.l1_u.push_back(l1);
    rec.sup_u.push_back(sup);
    for (std::size_t q = 0; q < lp_orders.size(); ++q) {
      double p = lp_orders[q], s = 0.0;
      for (std::size_t c = 0; c < b.size(); ++c) s += b.volume[c] * std::pow(std::fabs(f[c]), p);
      rec.lp_u[q].push_back(std::pow(s, 1.0 / p));
    }
    rec.bint_u.push_back(bint.empty() ? 0.0 : bint[i]);
  }
  for (int j = 0; j < sys.m2; ++j) {
    const auto& f = state.v[j];
    const double h = meshes.circle->h;
    double l1 = 0.0, sup = 0.0, integral = 0.0;
    for (double x : f) {
      l1 += h * std::fabs(x);
      integral += h * x;
      sup = std::max(sup, std::fabs(x));
    }
    rec.mass += w[j] * integral;
    rec.l1_v.push_back(l1);
    rec.sup_v.push_back(sup);
    for (std::size_t q = 0; q < lp_orders.size(); ++q) {
      double p = lp_orders[q], s = 0.0;
      for (double x : f) s += h * std::pow(std::fabs(x), p);
      rec.lp_v[q].push_back(std::pow(s, 1.0 / p));
    }
  }
  for (const auto& cfg : energy) {
    rec.energy.push_back(cfg.theta.empty() ? NAN : eval_Lp(b.volume, state.u, cfg));
  }
  return rec;
}

Simulator::Simulator(const ReactionSystem& sys, const SimMeshes& meshes, const SimConfig& config)
    : sys_(sys), meshes_(meshes), config_(config) {
  config_.validate();
  check_compatible(sys, meshes);
  const BulkMesh& b = meshes.bulk;
  const int n = static_cast<int>(b.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& f : b.faces) {
    trip.emplace_back(f.a, f.a, f.transmissibility);
    trip.emplace_back(f.b, f.b, f.transmissibility);
    trip.emplace_back(f.a, f.b, -f.transmissibility);
    trip.emplace_back(f.b, f.a, -f.transmissibility);
  }
  bulk_K_.resize(n, n);
  bulk_K_.setFromTriplets(trip.begin(), trip.end());
  if (meshes.circle) {
    const int nc = meshes.circle->ntheta;
    const double s = 1.0 / (meshes.circle->h * meshes.circle->h);
    trip.clear();
    for (int k = 0; k < nc; ++k) {
      int kn = (k + 1) % nc;
      trip.emplace_back(k, k, s);
      trip.emplace_back(kn, kn, s);
      trip.emplace_back(k, kn, -s);
      trip.emplace_back(kn, k, -s);
    }
    surface_K_.resize(nc, nc);
    surface_K_.setFromTriplets(trip.begin(), trip.end());
  }
  bint_.assign(static_cast<std::size_t>(sys.m1), 0.0);
}

Simulator::~Simulator() = default;

const Ldlt& Simulator::bulk_solver(double d, double dt) {
  auto key = std::make_pair(d, dt);
  auto it = bulk_cache_.find(key);
  if (it != bulk_cache_.end()) return *it->second;
  if (bulk_cache_.size() > 64) bulk_cache_.clear();
  const BulkMesh& b = meshes_.bulk;
  SparseMatrix M = bulk_K_ * (dt * d);
  for (int c = 0; c < static_cast<int>(b.size()); ++c) M.coeffRef(c, c) += b.volume[c];
  auto solver = std::make_unique<Ldlt>(M);
  if (solver->info() != Eigen::Success) throw std::runtime_error("bulk factorization failed");
  return *bulk_cache_.emplace(key, std::move(solver)).first->second;
}

const Ldlt& Simulator::surface_solver(double delta, double dt) {
  auto key = std::make_pair(delta, dt);
  auto it = surface_cache_.find(key);
  if (it != surface_cache_.end()) return *it->second;
  if (surface_cache_.size() > 64) surface_cache_.clear();
  SparseMatrix M = surface_K_ * (dt * delta);
  for (int k = 0; k < M.rows(); ++k) M.coeffRef(k, k) += 1.0;
  auto solver = std::make_unique<Ldlt>(M);
  if (solver->info() != Eigen::Success) throw std::runtime_error("surface factorization failed");
  return *surface_cache_.emplace(key, std::move(solver)).first->second;
}

// Row k holds (u at the boundary cell of face k, v at the matching node).
std::vector<double> Simulator::boundary_trace(const DiskState& s) const {
  const auto& bf = meshes_.bulk.boundary;
  const std::size_t m = static_cast<std::size_t>(sys_.num_vars());
  std::vector<double> z(bf.size() * m);
  for (std::size_t k = 0; k < bf.size(); ++k) {
    for (int i = 0; i < sys_.m1; ++i) z[k * m + i] = s.u[i][bf[k].cell];
    for (int j = 0; j < sys_.m2; ++j) z[k * m + sys_.m1 + j] = s.v[j][bf[k].node];
  }
  return z;
}

bool Simulator::attempt(const DiskState& in, DiskState& out, double dt, bool clip) {
  const BulkMesh& b = meshes_.bulk;
  const auto& bf = b.boundary;
  const std::size_t m = static_cast<std::size_t>(sys_.num_vars());
  const std::vector<double> z = boundary_trace(in);
  out.t = in.t;
  out.u.resize(in.u.size());
  out.v.resize(in.v.size());

  bool any_F = std::any_of(sys_.F.begin(), sys_.F.end(), [](const Polynomial& p) { return !p.is_zero(); });
  std::vector<std::vector<double>> Fval(static_cast<std::size_t>(sys_.m1), std::vector<double>(b.size(), 0.0));
  if (any_F) {
    std::vector<double> uc(static_cast<std::size_t>(sys_.m1));
    for (std::size_t c = 0; c < b.size(); ++c) {
      for (int i = 0; i < sys_.m1; ++i) uc[i] = in.u[i][c];
      for (int i = 0; i < sys_.m1; ++i) {
        if (!sys_.F[i].is_zero()) Fval[i][c] = sys_.F[i].evaluate(uc);
      }
    }
  }
  for (int i = 0; i < sys_.m1; ++i) {
    Eigen::VectorXd rhs(b.size());
    for (std::size_t c = 0; c < b.size(); ++c) rhs[c] = b.volume[c] * (in.u[i][c] + dt * Fval[i][c]);
    if (!sys_.G[i].is_zero()) {
      for (std::size_t k = 0; k < bf.size(); ++k) {
        double flux = sys_.G[i].evaluate(std::span<const double>(z.data() + k * m, m));
        rhs[bf[k].cell] += dt * flux * bf[k].area;
      }
    }
    Eigen::VectorXd sol = bulk_solver(sys_.d[i], dt).solve(rhs);
    out.u[i].assign(sol.data(), sol.data() + sol.size());
  }
  for (int j = 0; j < sys_.m2; ++j) {
    const std::size_t nc = meshes_.circle->size();
    Eigen::VectorXd rhs(nc);
    for (std::size_t k = 0; k < nc; ++k) rhs[k] = in.v[j][k];
    if (!sys_.H[j].is_zero()) {
      for (std::size_t k = 0; k < bf.size(); ++k) {
        rhs[bf[k].node] += dt * sys_.H[j].evaluate(std::span<const double>(z.data() + k * m, m));
      }
    }
    Eigen::VectorXd sol = surface_solver(sys_.delta[j], dt).solve(rhs);
    out.v[j].assign(sol.data(), sol.data() + sol.size());
  }

  bool ok = true;
  auto police = [&](std::vector<double>& f) {
    double scale = 0.0;
    for (double x : f) scale = std::max(scale, std::fabs(x));
    const double noise = 1e-13 * scale;
    for (double& x : f) {
      if (x < 0.0) {
        if (x >= -noise || clip) x = 0.0;
        else ok = false;
      }
    }
  };
  for (auto& f : out.u) police(f);
  for (auto& f : out.v) police(f);
  return ok;
}

void Simulator::step(DiskState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  const double t0 = state.t;
  const auto& bf = meshes_.bulk.boundary;
  auto boundary_sum = [&](const DiskState& s, int i) {
    double acc = 0.0;
    for (const auto& f : bf) acc += f.area * s.u[i][f.cell];
    return acc;
  };
  auto accept = [&](DiskState& trial, double h) {
    for (int i = 0; i < sys_.m1; ++i) bint_[i] += 0.5 * h * (boundary_sum(state, i) + boundary_sum(trial, i));
    trial.t = state.t + h;
    std::swap(state, trial);
    double sup = 0.0;
    bool finite = true;
    for (const auto* fields : {&state.u, &state.v}) {
      for (const auto& f : *fields) {
        for (double x : f) {
          if (!std::isfinite(x)) finite = false;
          sup = std::max(sup, std::fabs(x));
        }
      }
    }
    if (!finite || sup > config_.blowup_threshold) throw BlowupDetected(state.t);
  };

  DiskState trial;
  double remaining = dt;
  double sub = dt;
  long substeps = 0;
  while (remaining > 1e-14 * dt) {
    double h = std::min(sub, remaining);
    if (++substeps > (1L << 16)) h = remaining;
    bool accepted = false;
    double hk = h;
    for (int k = 0; k <= config_.max_halvings; ++k, hk *= 0.5) {
      if (attempt(state, trial, hk, false)) {
        accept(trial, hk);
        remaining -= hk;
        sub = std::min(dt, 2.0 * hk);
        accepted = true;
        break;
      }
      if (k < config_.max_halvings) ++halvings_;
    }
    if (!accepted) {
      attempt(state, trial, h, true);
      ++clips_;
      accept(trial, h);
      remaining -= h;
    }
  }
  state.t = t0 + dt;
}

Trajectory run_simulation(const ReactionSystem& sys, const DiskState& initial, const SimConfig& config,
                          const SimMeshes& meshes, bool keep_snapshots) {
  config.validate();
  Simulator sim(sys, meshes, config);
  const auto energy = energy_configs(sys, config.lp_orders);
  Trajectory traj;
  DiskState state = initial;
  auto record = [&] {
    traj.records.push_back(compute_diagnostics(state, sys, meshes, config.lp_orders, energy, sim.boundary_integrals(),
                                               sim.halvings(), sim.clip_events()));
    if (keep_snapshots) traj.snapshots.push_back(state);
  };
  record();
  const double t_start = state.t;
  const long nsteps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
  try {
    for (long k = 1; k <= nsteps; ++k) {
      double target = std::min(t_start + k * config.dt, t_start + config.t_end);
      sim.step(state, target - state.t);
      state.t = target;
      if (k % config.record_every == 0 || k == nsteps) record();
    }
  } catch (const BlowupDetected& e) {
    traj.blowup = true;
    traj.t_blowup = e.t();
    record();
  }
  return traj;
}

std::string diagnostics_header(const ReactionSystem& sys, const std::vector<int>& lp_orders) {
  std::string h = "t,mass";
  for (int i = 1; i <= sys.m1; ++i) {
    std::string s = std::to_string(i);
    h += ",l1_u" + s;
    for (int p : lp_orders) h += ",lp" + std::to_string(p) + "_u" + s;
    h += ",sup_u" + s + ",bint_u" + s;
  }
  for (int j = 1; j <= sys.m2; ++j) {
    std::string s = std::to_string(j);
    h += ",l1_v" + s;
    for (int p : lp_orders) h += ",lp" + std::to_string(p) + "_v" + s;
    h += ",sup_v" + s;
  }
  for (int p : lp_orders) h += ",energy_p" + std::to_string(p);
  h += ",halvings,posviol";
  return h;
}

void write_diagnostics_csv(std::ostream& os, const ReactionSystem& sys, const std::vector<int>& lp_orders,
                           const std::vector<DiagnosticsRecord>& records) {
  os << diagnostics_header(sys, lp_orders) << '\n';
  for (const auto& r : records) {
    os << format_double(r.t) << ',' << format_double(r.mass);
    for (int i = 0; i < sys.m1; ++i) {
      os << ',' << format_double(r.l1_u[i]);
      for (std::size_t q = 0; q < lp_orders.size(); ++q) os << ',' << format_double(r.lp_u[q][i]);
      os << ',' << format_double(r.sup_u[i]) << ',' << format_double(r.bint_u[i]);
    }
    for (int j = 0; j < sys.m2; ++j) {
      os << ',' << format_double(r.l1_v[j]);
      for (std::size_t q = 0; q < lp_orders.size(); ++q) os << ',' << format_double(r.lp_v[q][j]);
      os << ',' << format_double(r.sup_v[j]);
    }
    for (double e : r.energy) os << ',' << format_double(e);
    os << ',' << r.halvings << ',' << r.posviol << '\n';
  }
}

void write_snapshot(std::ostream& os, const DiskState& state, const SimMeshes& meshes) {
  os << meshes.bulk.descriptor() << " m1=" << state.u.size() << " m2=" << state.v.size()
     << " t=" << format_double(state.t) << '\n';
  for (const auto* fields : {&state.u, &state.v}) {
    for (const auto& f : *fields) {
      for (std::size_t k = 0; k < f.size(); ++k) os << (k ? " " : "") << format_double(f[k]);
      os << '\n';
    }
  }
}

Snapshot read_snapshot(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("snapshot is empty");
  std::map<std::string, std::string> kv;
  std::istringstream hs(header);
  std::string tok;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed snapshot header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("snapshot header lacks '" + key + "'");
    return it->second;
  };
  Snapshot snap;
  if (get("mesh") == "disk") {
    snap.meshes = make_disk_meshes(std::stoi(get("nr")), std::stoi(get("ntheta")), std::stod(get("R")));
  } else if (get("mesh") == "interval") {
    snap.meshes = make_interval_meshes(std::stoi(get("nx")), std::stod(get("L")));
  } else {
    throw std::runtime_error("unknown snapshot mesh '" + get("mesh") + "'");
  }
  int m1 = std::stoi(get("m1")), m2 = std::stoi(get("m2"));
  snap.state.t = std::stod(get("t"));
  auto read_line = [&](std::size_t expected) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("snapshot truncated");
    std::istringstream ls(line);
    std::vector<double> f;
    double x;
    while (ls >> x) f.push_back(x);
    if (f.size() != expected) throw std::runtime_error("snapshot field has wrong length");
    return f;
  };
  for (int i = 0; i < m1; ++i) snap.state.u.push_back(read_line(snap.meshes.bulk.size()));
  for (int j = 0; j < m2; ++j) {
    if (!snap.meshes.circle) throw std::runtime_error("surface fields on a mesh without boundary circle");
    snap.state.v.push_back(read_line(snap.meshes.circle->size()));
  }
  return snap;
}

double heat_mr_probe(const CircleMesh& mesh, const std::function<double(double, double)>& forcing, double T,
                     double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("horizon and step must be positive");
  const int n = mesh.ntheta;
  const double s = 1.0 / (mesh.h * mesh.h);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < n; ++k) {
    int kn = (k + 1) % n;
    trip.emplace_back(k, k, s);
    trip.emplace_back(kn, kn, s);
    trip.emplace_back(k, kn, -s);
    trip.emplace_back(kn, k, -s);
  }
  SparseMatrix L(n, n);
  L.setFromTriplets(trip.begin(), trip.end());
  SparseMatrix I(n, n);
  I.setIdentity();
  SparseMatrix lhs = I + L * (0.5 * dt);
  SparseMatrix rhs_op = I - L * (0.5 * dt);
  Ldlt solver(lhs);
  if (solver.info() != Eigen::Success) throw std::runtime_error("probe factorization failed");
  const long steps = std::max(1L, std::lround(T / dt));
  const double h = T / steps;
  Eigen::VectorXd U = Eigen::VectorXd::Zero(n), F(n);
  double num = 0.0, den = 0.0;
  for (long k = 0; k < steps; ++k) {
    double tm = (k + 0.5) * h;
    for (int j = 0; j < n; ++j) F[j] = forcing(mesh.theta[j], tm);
    Eigen::VectorXd next = solver.solve(rhs_op * U + h * F);
    Eigen::VectorXd lap = L * (0.5 * (U + next));
    num += h * mesh.h * lap.squaredNorm();
    den += h * mesh.h * F.squaredNorm();
    U = next;
  }
  if (!(den > 0.0)) throw std::invalid_argument("forcing is identically zero; ratio undefined");
  return std::sqrt(num / den);
}

}  // namespace bulksurf
