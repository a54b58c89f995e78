#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bulksurf/conditions.hpp"
#include "bulksurf/reaction_system.hpp"
#include "bulksurf/solver.hpp"

namespace bulksurf {

struct SimSettings {
  double dt = 1e-3;
  double t_end = 1.0;
  int nr = 16;
  int ntheta = 64;
  double R = 1.0;
  int nx = 64;
  double length = 1.0;
  std::uint64_t seed = 42;
  std::vector<int> lp_orders = {2};
  int record_every = 1;
  double blowup_threshold = 1e6;
  int max_halvings = 30;

  SimConfig config() const;
  // Disk for n >= 2, interval for n = 1.
  SimMeshes meshes(int n) const;
};

// Text form of a model: species, diffusion, reaction expressions and the
// optional structure used by the checks, plus initial data and run settings.
struct ModelSpec {
  int n = 2;
  int m1 = 1;
  int m2 = 0;
  std::vector<double> d;
  std::vector<double> delta;
  std::vector<std::string> bulk_names;
  std::vector<std::string> surface_names;
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::string> F, G, H;
  std::optional<Eigen::MatrixXd> A;
  std::optional<MassWeights> mass_weights;
  std::optional<MassConstants> mass_constants;
  TheoremExtras theorem;
  std::vector<std::string> ic_u;
  std::vector<std::string> ic_v;
  std::optional<SimSettings> sim;

  ReactionSystem build() const;
  InitialData initial_data() const;
  std::map<std::string, double> parameter_map() const;
};

class ModelFileError : public std::runtime_error {
 public:
  ModelFileError(const std::string& source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

ModelSpec parse_model_text(const std::string& text, const std::string& source = "<model>");
ModelSpec load_model_file(const std::string& path);
std::string serialize_model(const ModelSpec& spec);

}  // namespace bulksurf
