#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rq {

// An ordered set of n points in R^d, stored row-major in a flat buffer
// (point i occupies coords[i*dim .. i*dim+dim)). This is the state of the
// chains and the node sets handed to the energy routines.
struct ParticleConfig {
  int n = 0;
  int dim = 0;
  std::vector<double> coords;

  ParticleConfig() = default;
  ParticleConfig(int n_, int dim_) : n(n_), dim(dim_), coords(static_cast<std::size_t>(n_) * dim_, 0.0) {
    if (n_ < 1 || dim_ < 1) throw std::invalid_argument("ParticleConfig: n and dim must be positive");
  }

  std::span<const double> point(int i) const {
    return {coords.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> point(int i) {
    return {coords.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }

  bool operator==(const ParticleConfig&) const = default;
};

inline double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return s;
}

// Index order that sorts points lexicographically by coordinates. Energy
// scalars are accumulated in this order so that they depend only on the
// multiset of points, not on the input ordering.
std::vector<int> canonical_order(const ParticleConfig& config);

ParticleConfig reorder(const ParticleConfig& config, const std::vector<int>& order);

}  // namespace rq
