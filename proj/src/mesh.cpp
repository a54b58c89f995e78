#include "bulksurf/mesh.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bulksurf/format.hpp"

namespace bulksurf {

double BulkMesh::total_volume() const { return std::accumulate(volume.begin(), volume.end(), 0.0); }

std::string BulkMesh::descriptor() const {
  std::ostringstream os;
  if (kind == Kind::Disk) {
    os << "mesh=disk nr=" << nr << " ntheta=" << ntheta << " R=" << format_double(R);
  } else {
    os << "mesh=interval nx=" << nx << " L=" << format_double(length);
  }
  return os.str();
}

BulkMesh build_disk_mesh(int nr, int ntheta, double R) {
  if (nr < 3) throw std::invalid_argument("disk mesh needs nr >= 3");
  if (ntheta < 8 || ntheta % 2 != 0) throw std::invalid_argument("disk mesh needs even ntheta >= 8");
  if (!(R > 0.0)) throw std::invalid_argument("disk radius must be positive");
  BulkMesh m;
  m.kind = BulkMesh::Kind::Disk;
  m.nr = nr;
  m.ntheta = ntheta;
  m.R = R;
  const double dr = R / nr;
  const double dth = 2.0 * M_PI / ntheta;
  const std::size_t n = static_cast<std::size_t>(nr) * ntheta;
  m.volume.resize(n);
  m.x.resize(n);
  m.y.resize(n);
  m.r.resize(n);
  m.theta.resize(n);
  for (int i = 0; i < nr; ++i) {
    double r0 = i * dr, r1 = (i + 1) * dr, rc = (i + 0.5) * dr;
    for (int j = 0; j < ntheta; ++j) {
      std::size_t c = static_cast<std::size_t>(i) * ntheta + j;
      double th = (j + 0.5) * dth;
      m.volume[c] = 0.5 * (r1 * r1 - r0 * r0) * dth;
      m.r[c] = rc;
      m.theta[c] = th;
      m.x[c] = rc * std::cos(th);
      m.y[c] = rc * std::sin(th);
      int jn = (j + 1) % ntheta;
      m.faces.push_back({static_cast<int>(c), i * ntheta + jn, dr / (rc * dth)});
      if (i + 1 < nr) m.faces.push_back({static_cast<int>(c), (i + 1) * ntheta + j, r1 * dth / dr});
    }
  }
  for (int j = 0; j < ntheta; ++j) m.boundary.push_back({(nr - 1) * ntheta + j, R * dth, j});
  return m;
}

BulkMesh build_interval_mesh(int nx, double length) {
  if (nx < 3) throw std::invalid_argument("interval mesh needs nx >= 3");
  if (!(length > 0.0)) throw std::invalid_argument("interval length must be positive");
  BulkMesh m;
  m.kind = BulkMesh::Kind::Interval;
  m.nx = nx;
  m.length = length;
  const double h = length / nx;
  for (int i = 0; i < nx; ++i) {
    m.volume.push_back(h);
    m.x.push_back((i + 0.5) * h);
    m.y.push_back(0.0);
    m.r.push_back((i + 0.5) * h);
    m.theta.push_back(0.0);
    if (i + 1 < nx) m.faces.push_back({i, i + 1, 1.0 / h});
  }
  m.boundary.push_back({0, 1.0, 0});
  m.boundary.push_back({nx - 1, 1.0, 1});
  return m;
}

CircleMesh build_circle_mesh(int ntheta, double R) {
  if (ntheta < 3) throw std::invalid_argument("circle mesh needs at least 3 nodes");
  if (!(R > 0.0)) throw std::invalid_argument("circle radius must be positive");
  CircleMesh c;
  c.ntheta = ntheta;
  c.R = R;
  c.h = 2.0 * M_PI * R / ntheta;
  for (int j = 0; j < ntheta; ++j) c.theta.push_back((j + 0.5) * 2.0 * M_PI / ntheta);
  return c;
}

std::vector<double> apply_bulk_diffusion(const BulkMesh& mesh, double d, std::span<const double> field,
                                         std::span<const double> boundary_flux) {
  if (field.size() != mesh.size()) throw std::invalid_argument("field length differs from cell count");
  if (!boundary_flux.empty() && boundary_flux.size() != mesh.boundary.size()) {
    throw std::invalid_argument("boundary flux length differs from boundary face count");
  }
  std::vector<double> rate(mesh.size(), 0.0);
  for (const auto& f : mesh.faces) {
    double q = d * f.transmissibility * (field[f.b] - field[f.a]);
    rate[f.a] += q;
    rate[f.b] -= q;
  }
  for (std::size_t k = 0; k < mesh.boundary.size() && !boundary_flux.empty(); ++k) {
    rate[mesh.boundary[k].cell] += boundary_flux[k] * mesh.boundary[k].area;
  }
  for (std::size_t c = 0; c < mesh.size(); ++c) rate[c] /= mesh.volume[c];
  return rate;
}

std::vector<double> apply_surface_diffusion(const CircleMesh& mesh, double delta, std::span<const double> field) {
  if (field.size() != mesh.size()) throw std::invalid_argument("field length differs from node count");
  const std::size_t n = mesh.size();
  std::vector<double> rate(n);
  const double s = delta / (mesh.h * mesh.h);
  for (std::size_t k = 0; k < n; ++k) {
    rate[k] = s * (field[(k + n - 1) % n] - 2.0 * field[k] + field[(k + 1) % n]);
  }
  return rate;
}

}  // namespace bulksurf
