#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bulksurf/model_file.hpp"
#include "bulksurf/polynomial.hpp"
#include "bulksurf/reaction_system.hpp"

namespace bulksurf {

// What the condition checker and classifier should report for a preset.
struct ExpectedHighlights {
  std::optional<double> p_omega;
  std::optional<double> p_M;
  std::optional<double> mu_M;
  bool conservation = false;
  std::string theorem_summary;
};

struct ModelPreset {
  std::string name;
  std::string description;
  ModelSpec spec;
  ReactionSystem system;
  ExpectedHighlights expected;
};

struct MembraneRates {
  double k0 = 1.0, kb = 1.0, kd = 1.0, km = 1.0, kg = 1.0;
  std::vector<double> k;  // k2..kN; empty means all 1
};

// One bulk species u and N surface species v1..vN (cluster sizes).
ModelPreset membrane_clustering(int N = 3, const MembraneRates& rates = {});

struct Cdc42Rates {
  double k1 = 1.0, km1 = 1.0, k2 = 1.0, km2 = 1.0, k3 = 1.0, kmax = 1.0;
};
struct Cdc42Diffusion {
  double DG = 1.0, DI = 1.0, DA = 1.0;
};

// Bulk G, surface species ordered (I, A).
ModelPreset cdc42(const Cdc42Rates& rates = {}, const Cdc42Diffusion& D = {});

// Two bulk and two surface species with cubic bulk exchange and sixth-order surface terms.
ModelPreset cubic_example();

// Single bulk species with boundary flux u^2; blows up in finite time.
ModelPreset blowup_toy();

// F = -u, no flux.
ModelPreset linear_decay();

struct Remark24Pair {
  Polynomial F1, F2;
  std::vector<double> ell;
  ReactionSystem system;  // n = 3, m2 = 0, A = [[1,0],[1,1]]
};

Remark24Pair remark24_pair();
ModelPreset remark24_preset();

std::vector<std::string> preset_names();
// Throws std::invalid_argument for an unknown name.
ModelPreset make_preset(const std::string& name);

}  // namespace bulksurf
