#include "bulksurf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bulksurf {

namespace {

constexpr std::size_t kMaxGridPoints = 1000000;
constexpr std::size_t kChunk = 1024;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void SamplingPlan::validate() const {
  if (!(box_radius > 0.0)) throw std::invalid_argument("box radius must be positive");
  if (grid_per_axis < 2) throw std::invalid_argument("grid_per_axis must be >= 2");
  if (random_samples < 0) throw std::invalid_argument("random_samples must be >= 0");
}

SampleSet::SampleSet(const SamplingPlan& plan, std::size_t dim) : dim_(dim) {
  plan.validate();
  if (dim == 0) {
    count_ = 1;
    return;
  }
  std::size_t grid = 1;
  bool use_grid = true;
  for (std::size_t i = 0; i < dim; ++i) {
    grid *= static_cast<std::size_t>(plan.grid_per_axis);
    if (grid > kMaxGridPoints) {
      use_grid = false;
      break;
    }
  }
  std::size_t nrand = static_cast<std::size_t>(plan.random_samples);
  count_ = (use_grid ? grid : 0) + nrand;
  data_.resize(count_ * dim);
  std::size_t k = 0;
  if (use_grid) {
    std::vector<int> idx(dim, 0);
    double step = plan.box_radius / (plan.grid_per_axis - 1);
    for (std::size_t g = 0; g < grid; ++g, ++k) {
      for (std::size_t i = 0; i < dim; ++i) data_[k * dim + i] = idx[i] * step;
      for (std::size_t i = 0; i < dim; ++i) {
        if (++idx[i] < plan.grid_per_axis) break;
        idx[i] = 0;
      }
    }
  }
  std::uniform_real_distribution<double> unif(0.0, plan.box_radius);
  for (std::size_t chunk = 0; chunk * kChunk < nrand; ++chunk) {
    auto rng = stream(plan.rng_seed, chunk);
    std::size_t end = std::min(nrand, (chunk + 1) * kChunk);
    for (std::size_t r = chunk * kChunk; r < end; ++r, ++k) {
      for (std::size_t i = 0; i < dim; ++i) data_[k * dim + i] = unif(rng);
    }
  }
}

std::vector<std::vector<double>> face_rays(const std::vector<bool>& support, std::uint64_t seed, int count) {
  std::size_t dim = support.size();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < dim; ++i) {
    if (support[i]) idx.push_back(i);
  }
  std::vector<std::vector<double>> rays;
  if (idx.empty()) return rays;
  std::vector<double> bary(dim, 0.0);
  for (auto i : idx) bary[i] = 1.0 / idx.size();
  rays.push_back(bary);
  if (idx.size() == 1) return rays;
  auto rng = stream(seed, 0x9e3779b97f4a7c15ULL);
  std::exponential_distribution<double> expo(1.0);
  for (int r = 0; r < count; ++r) {
    std::vector<double> w(dim, 0.0);
    double sum = 0.0;
    for (auto i : idx) {
      w[i] = expo(rng) + 1e-3;
      sum += w[i];
    }
    for (auto i : idx) w[i] /= sum;
    rays.push_back(std::move(w));
  }
  return rays;
}

namespace {

std::vector<std::vector<bool>> face_supports(const std::vector<bool>& active, std::uint64_t seed) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i]) idx.push_back(i);
  }
  std::vector<std::vector<bool>> out;
  std::size_t k = idx.size();
  if (k == 0) return out;
  auto make = [&](std::uint64_t mask) {
    std::vector<bool> s(active.size(), false);
    for (std::size_t b = 0; b < k; ++b) {
      if (mask >> b & 1U) s[idx[b]] = true;
    }
    return s;
  };
  if (k <= 12) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) out.push_back(make(mask));
    return out;
  }
  for (std::size_t b = 0; b < k; ++b) out.push_back(make(std::uint64_t{1} << b));
  out.push_back(make((std::uint64_t{1} << k) - 1));
  auto rng = stream(seed, 0x51ed270b27aa0c3dULL);
  for (int r = 0; r < 4096; ++r) {
    std::uint64_t mask = rng() & ((std::uint64_t{1} << k) - 1);
    if (mask != 0) out.push_back(make(mask));
  }
  return out;
}

struct Leading {
  int degree = -1;
  double coeff = 0.0;
};

Leading leading_on_ray(const std::vector<std::pair<int, Polynomial>>& parts, const std::vector<double>& w) {
  for (const auto& [deg, part] : parts) {
    double c = 0.0, scale = 0.0;
    for (const auto& [beta, coef] : part.terms()) {
      double m = coef;
      for (std::size_t i = 0; i < w.size(); ++i) {
        for (int e = 0; e < beta[i]; ++e) m *= w[i];
      }
      c += m;
      scale += std::fabs(m);
    }
    if (scale > 0.0 && std::fabs(c) > 1e-12 * scale) return {deg, c};
  }
  return {};
}

void consider(RayGrowth& g, double degree, double slope, const std::vector<double>& w) {
  if (degree > g.degree + 1e-12 || (std::fabs(degree - g.degree) <= 1e-12 && slope > g.slope)) {
    g.degree = degree;
    g.slope = slope;
    g.witness = w;
  }
}

}  // namespace

RayGrowth ray_growth(const Polynomial& p, const std::vector<bool>& active, std::uint64_t seed, int rays_per_face) {
  if (active.size() != p.num_vars()) throw std::invalid_argument("active mask has wrong length");
  RayGrowth g;
  g.sampling_only = p.has_pos();
  auto supports = face_supports(active, seed);
  std::uint64_t face_no = 0;
  for (const auto& support : supports) {
    auto rays = face_rays(support, seed + 7919 * (++face_no), rays_per_face);
    if (!p.has_pos()) {
      Polynomial r = p.restricted(support);
      std::vector<std::pair<int, Polynomial>> parts;
      for (int deg = r.total_degree(); deg >= 0; --deg) {
        Polynomial h = r.homogeneous_part(deg);
        if (!h.is_zero()) parts.emplace_back(deg, std::move(h));
      }
      if (parts.empty()) continue;
      for (const auto& w : rays) {
        Leading lead = leading_on_ray(parts, w);
        if (lead.degree >= 0 && lead.coeff > 0.0) consider(g, lead.degree, lead.coeff, w);
      }
    } else {
      for (const auto& w : rays) {
        std::vector<double> x(w.size());
        auto at = [&](double s) {
          for (std::size_t i = 0; i < w.size(); ++i) x[i] = s * w[i];
          return p.evaluate(x);
        };
        double hi = at(1e6), lo = at(1e5);
        if (!(hi > 0.0)) continue;
        double deg = lo > 0.0 ? std::log10(hi / lo) : std::log10(hi) / 6.0;
        deg = std::max(deg, 0.0);
        if (std::fabs(deg - std::round(deg)) < 0.02) deg = std::round(deg);
        consider(g, deg, hi / std::pow(1e6, deg), w);
      }
    }
  }
  return g;
}

}  // namespace bulksurf
