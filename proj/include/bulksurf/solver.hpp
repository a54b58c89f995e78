#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "bulksurf/energy.hpp"
#include "bulksurf/mesh.hpp"
#include "bulksurf/reaction_system.hpp"
#include "bulksurf/scalar_expr.hpp"

namespace bulksurf {

struct DiskState {
  double t = 0.0;
  std::vector<std::vector<double>> u;  // u[i][cell]
  std::vector<std::vector<double>> v;  // v[j][node]
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double theta_imex = 1.0;
  int max_halvings = 30;
  double blowup_threshold = 1e6;
  int record_every = 1;
  std::vector<int> lp_orders = {2};
  std::uint64_t rng_seed = 42;

  void validate() const;
};

struct SimMeshes {
  BulkMesh bulk;
  std::optional<CircleMesh> circle;
};

// Disk with a matching circle, or the interval (m2 = 0 only).
SimMeshes make_disk_meshes(int nr, int ntheta, double R);
SimMeshes make_interval_meshes(int nx, double length);

// Initial data as expressions of (x, y, r, theta).
struct InitialData {
  std::vector<std::string> u;
  std::vector<std::string> v;
  std::map<std::string, double> parameters;
};

DiskState initial_state(const ReactionSystem& sys, const SimMeshes& meshes, const InitialData& ic);

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  std::vector<double> l1_u, sup_u, bint_u;
  std::vector<std::vector<double>> lp_u;  // [order][species]
  std::vector<double> l1_v, sup_v;
  std::vector<std::vector<double>> lp_v;
  std::vector<double> energy;  // one per lp order
  long halvings = 0;
  long posviol = 0;
};

class BlowupDetected : public std::runtime_error {
 public:
  explicit BlowupDetected(double t);
  double t() const { return t_; }

 private:
  double t_;
};

// Energy configurations for each order in lp_orders, theta from select_theta
// (identity A when the system carries none). Orders outside [2, 20] or
// selections that overflow get an empty theta and a NaN energy column.
std::vector<EnergyConfig> energy_configs(const ReactionSystem& sys, const std::vector<int>& lp_orders);

DiagnosticsRecord compute_diagnostics(const DiskState& state, const ReactionSystem& sys, const SimMeshes& meshes,
                                      const std::vector<int>& lp_orders, const std::vector<EnergyConfig>& energy,
                                      const std::vector<double>& bint = {}, long halvings = 0, long posviol = 0);

class Simulator {
 public:
  Simulator(const ReactionSystem& sys, const SimMeshes& meshes, const SimConfig& config);
  ~Simulator();

  // Advances by dt with reject-and-halve positivity control.
  // Throws BlowupDetected when a sup norm passes the threshold or turns non-finite.
  void step(DiskState& state, double dt);

  long halvings() const { return halvings_; }
  long clip_events() const { return clips_; }
  const std::vector<double>& boundary_integrals() const { return bint_; }

 private:
  bool attempt(const DiskState& in, DiskState& out, double dt, bool clip);
  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& bulk_solver(double d, double dt);
  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& surface_solver(double delta, double dt);
  std::vector<double> boundary_trace(const DiskState& s) const;

  const ReactionSystem& sys_;
  const SimMeshes& meshes_;
  SimConfig config_;
  Eigen::SparseMatrix<double> bulk_K_;
  Eigen::SparseMatrix<double> surface_K_;
  std::map<std::pair<double, double>, std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>> bulk_cache_;
  std::map<std::pair<double, double>, std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>> surface_cache_;
  std::vector<double> bint_;
  long halvings_ = 0;
  long clips_ = 0;
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<DiskState> snapshots;
  bool blowup = false;
  double t_blowup = 0.0;
};

Trajectory run_simulation(const ReactionSystem& sys, const DiskState& initial, const SimConfig& config,
                          const SimMeshes& meshes, bool keep_snapshots = false);

std::string diagnostics_header(const ReactionSystem& sys, const std::vector<int>& lp_orders);
void write_diagnostics_csv(std::ostream& os, const ReactionSystem& sys, const std::vector<int>& lp_orders,
                           const std::vector<DiagnosticsRecord>& records);

// Snapshot text: one header line with the mesh descriptor, m1, m2 and t,
// then one line per field (u1..um1, v1..vm2), values space separated.
void write_snapshot(std::ostream& os, const DiskState& state, const SimMeshes& meshes);
struct Snapshot {
  SimMeshes meshes;
  DiskState state;
};
Snapshot read_snapshot(std::istream& is);

// Crank-Nicolson solve of U_t - Lap_M U = F on the circle with U(0) = 0;
// returns ||Lap_M U|| / ||F|| in L2 over the circle and (0, T).
double heat_mr_probe(const CircleMesh& mesh, const std::function<double(double, double)>& forcing, double T,
                     double dt);

}  // namespace bulksurf
