#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rq/rng.hpp"

namespace rq {

enum class TargetFamily { UniformBall, TruncatedGaussian, TruncatedGaussianMixture };

std::string target_family_name(TargetFamily family);

struct GaussianComponent {
  std::vector<double> center;
  double variance = 1.0;
  double trunc_radius = 1.0;  // hard truncation: density is zero outside B(center, trunc_radius)
  double weight = 1.0;
};

// A compactly supported target distribution: density known up to a constant,
// enclosing support radius R (so that supp(pi) is inside B(0, R)), and an
// exact sampler. Densities are unnormalized throughout; everything downstream
// (MH ratios, tempering) cancels the constant.
struct TargetMeasure {
  TargetFamily family = TargetFamily::UniformBall;
  int dim = 1;
  double radius = 1.0;  // enclosing R
  std::vector<GaussianComponent> components;

  static TargetMeasure uniform_ball(int dim, double radius);
  static TargetMeasure truncated_gaussian(std::vector<double> center, double variance,
                                          double trunc_radius);
  static TargetMeasure gaussian_mixture(std::vector<GaussianComponent> components);

  void validate() const;
};

// Balanced mixture of `count` truncated Gaussians whose centers sit evenly
// spaced on the circle of radius `circle_radius` in R^2.
TargetMeasure mixture_on_circle(int count, double trunc_radius, double variance,
                                double circle_radius = 1.0);

// log of the unnormalized density; -inf outside the support.
double log_density_unnorm(const TargetMeasure& t, std::span<const double> x);

// Tempered density pi^temper: temper * log_density, same support.
double log_density_unnorm(const TargetMeasure& t, std::span<const double> x, double temper);

// One exact draw. UniformBall uses the radial inverse CDF; the Gaussian
// families use rejection against the truncation ball. Throws SamplingError
// if the rejection budget is exhausted.
std::vector<double> exact_sample(const TargetMeasure& t, rng::Stream& rng);

struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Random-walk Metropolis-Hastings with isotropic Gaussian proposal, used both
// for the embedding estimator and for the baseline quadrature chain. Records
// `count` states of dimension `dim` into `out` (row-major). When
// `include_init` is set the first recorded state is x0 itself and count-1
// updates follow; otherwise the state after each of `count` updates is
// recorded. Returns the number of accepted proposals.
long rw_mh_chain(const std::function<double(std::span<const double>)>& log_density,
                 std::span<const double> x0, int count, bool include_init, double proposal_std,
                 rng::Stream& rng, double* out, int dim);

}  // namespace rq
