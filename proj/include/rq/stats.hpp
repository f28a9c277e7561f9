#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rq/particles.hpp"

namespace rq::stats {

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Unbiased sample variance; 0 for fewer than two values.
inline double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

inline double geometric_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::log(x);
  return v.empty() ? 0.0 : std::exp(s / static_cast<double>(v.size()));
}

// Least-squares slope of log(y) against log(x).
inline double slope_loglog(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

inline std::vector<double> nn_distances(const ParticleConfig& points) {
  std::vector<double> out(points.n, 0.0);
#pragma omp parallel for schedule(static) if (points.n >= 256)
  for (int i = 0; i < points.n; ++i) {
    double best = 1e300;
    for (int j = 0; j < points.n; ++j) {
      if (j == i) continue;
      best = std::min(best, squared_distance(points.point(i), points.point(j)));
    }
    out[i] = std::sqrt(best);
  }
  return out;
}

// Coefficient of variation (std/mean) of the nearest-neighbor distances: the
// crystallization statistic. Lower is more lattice-like.
inline double nn_distance_cv(const ParticleConfig& points) {
  const auto d = nn_distances(points);
  const double m = mean(d);
  return m > 0.0 ? std::sqrt(sample_variance(d)) / m : 0.0;
}

inline double max_norm(const ParticleConfig& points) {
  double best = 0.0;
  for (int i = 0; i < points.n; ++i) best = std::max(best, squared_norm(points.point(i)));
  return std::sqrt(best);
}

}  // namespace rq::stats
