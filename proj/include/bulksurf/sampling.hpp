#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bulksurf/polynomial.hpp"

namespace bulksurf {

struct SamplingPlan {
  double box_radius = 10.0;
  int grid_per_axis = 9;
  int random_samples = 10000;
  std::uint64_t rng_seed = 42;

  void validate() const;
};

// Flat list of points in [0, R]^dim: the tensor grid (when it has at most
// 10^6 points) followed by pseudo-random points. Random points are drawn in
// fixed-size chunks, each with its own stream seeded from (seed, chunk), so
// the set does not depend on how the work is split.
class SampleSet {
 public:
  SampleSet(const SamplingPlan& plan, std::size_t dim);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t k) const { return {data_.data() + k * dim_, dim_}; }

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> data_;
};

// Asymptotic behaviour of a polynomial along rays s*w, w >= 0, sum(w) = 1,
// restricted to variables flagged active (the rest are held at zero).
struct RayGrowth {
  // Largest degree k such that P(s w) ~ c s^k with c > 0 on some sampled ray;
  // -1 when P is bounded above by 0 asymptotically on every sampled ray.
  double degree = -1.0;
  // Largest leading coefficient among rays attaining `degree`.
  double slope = 0.0;
  // True when P contains pos() terms and growth was estimated numerically.
  bool sampling_only = false;
  std::vector<double> witness;
};

RayGrowth ray_growth(const Polynomial& p, const std::vector<bool>& active, std::uint64_t seed,
                     int rays_per_face = 24);

// Random directions on the face of the simplex spanned by `support`.
std::vector<std::vector<double>> face_rays(const std::vector<bool>& support, std::uint64_t seed, int count);

}  // namespace bulksurf
