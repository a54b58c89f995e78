#pragma once

#include <span>
#include <string>
#include <vector>

namespace bulksurf {

struct FvFace {
  int a = 0;
  int b = 0;
  double transmissibility = 0.0;  // face length / centre distance
};

struct FvBoundaryFace {
  int cell = 0;
  double area = 0.0;
  int node = 0;  // circle node on the disk, endpoint index on the interval
};

// Finite-volume bulk grid: a polar grid on the disk or a uniform grid on [0, L].
struct BulkMesh {
  enum class Kind { Disk, Interval };
  Kind kind = Kind::Disk;
  int nr = 0;
  int ntheta = 0;
  double R = 0.0;
  int nx = 0;
  double length = 0.0;

  std::vector<double> volume;
  std::vector<double> x;  // cell centres
  std::vector<double> y;
  std::vector<double> r;
  std::vector<double> theta;
  std::vector<FvFace> faces;
  std::vector<FvBoundaryFace> boundary;

  std::size_t size() const { return volume.size(); }
  double total_volume() const;
  std::string descriptor() const;
};

struct CircleMesh {
  int ntheta = 0;
  double R = 0.0;
  double h = 0.0;
  std::vector<double> theta;  // node angles

  std::size_t size() const { return static_cast<std::size_t>(ntheta); }
  double total_weight() const { return h * ntheta; }
};

// Cell (i, j) has index i * ntheta + j; ring i covers r in (i dr, (i+1) dr),
// the innermost ring consists of wedges meeting at the centre.
BulkMesh build_disk_mesh(int nr, int ntheta, double R);
BulkMesh build_interval_mesh(int nx, double length);
CircleMesh build_circle_mesh(int ntheta, double R);

// div(d grad u) per cell plus boundary_flux * area / volume on boundary cells.
std::vector<double> apply_bulk_diffusion(const BulkMesh& mesh, double d, std::span<const double> field,
                                         std::span<const double> boundary_flux);

// delta (v_{k-1} - 2 v_k + v_{k+1}) / h^2, periodic.
std::vector<double> apply_surface_diffusion(const CircleMesh& mesh, double delta, std::span<const double> field);

}  // namespace bulksurf
