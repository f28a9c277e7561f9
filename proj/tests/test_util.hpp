#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rq/kernels.hpp"
#include "rq/particles.hpp"
#include "rq/rng.hpp"

namespace rqtest {

inline rq::ParticleConfig random_config(int n, int dim, std::uint64_t seed, double scale = 1.0) {
  rq::ParticleConfig x(n, dim);
  rq::rng::Stream rng(seed);
  for (double& c : x.coords) c = scale * rng.normal();
  return x;
}

inline std::vector<double> random_point(int dim, rq::rng::Stream& rng, double scale = 1.0) {
  std::vector<double> p(dim);
  for (double& c : p) c = scale * rng.normal();
  return p;
}

// Central finite difference of a scalar function of one coordinate vector.
template <class Fn>
std::vector<double> finite_difference_grad(const Fn& f, std::vector<double> x, double step) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

inline double rel_error(double got, double want) {
  const double denom = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / denom;
}

inline double vector_rel_error(const std::vector<double>& got, const std::vector<double>& want) {
  double num = 0.0, denom = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    denom += want[i] * want[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(denom), 1e-300);
}

// Cholesky feasibility of (A + shift I): succeeds iff the smallest eigenvalue
// of A is > -shift, which is exactly the positive-definiteness smoke check.
inline bool cholesky_with_shift_succeeds(std::vector<double> a, int n, double shift) {
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] += shift;
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      const double l = a[static_cast<std::size_t>(j) * n + k];
      d -= l * l;
    }
    if (!(d > 0.0)) return false;
    const double lj = std::sqrt(d);
    a[static_cast<std::size_t>(j) * n + j] = lj;
    for (int i = j + 1; i < n; ++i) {
      double s = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        s -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
      a[static_cast<std::size_t>(i) * n + j] = s / lj;
    }
  }
  return true;
}

// Kolmogorov-Smirnov distance between a sample and the uniform CDF on [0, hi].
inline double ks_distance_uniform(std::vector<double> sample, double hi) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = sample[i] / hi;
    worst = std::max(worst, std::abs((i + 1) / n - cdf));
    worst = std::max(worst, std::abs(cdf - i / n));
  }
  return worst;
}

// Standard error of the mean of a correlated sequence via batch means.
inline double batch_means_se(const std::vector<double>& sequence, int batches) {
  const std::size_t batch_len = sequence.size() / batches;
  std::vector<double> batch_mean(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < batch_len; ++i) s += sequence[b * batch_len + i];
    batch_mean[b] = s / static_cast<double>(batch_len);
  }
  double m = 0.0;
  for (double v : batch_mean) m += v;
  m /= batches;
  double var = 0.0;
  for (double v : batch_mean) var += (v - m) * (v - m);
  var /= (batches - 1);
  return std::sqrt(var / batches);
}

// Scratch directory unique to a test binary run.
inline std::string scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rq_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace rqtest
