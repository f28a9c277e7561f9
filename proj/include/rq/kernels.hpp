#pragma once

#include <span>
#include <string>
#include <vector>

#include "rq/particles.hpp"

namespace rq {

enum class KernelFamily { Gaussian, TruncatedRiesz, TruncatedLog, TruncatedMultiquadric };

std::string kernel_family_name(KernelFamily family);

// A symmetric positive-definite radial kernel K(x,y) = weight * phi(|x-y|^2)
// with a closed-form value and gradient in the first argument.
//
//   Gaussian              phi(r2) = exp(-r2 / (2 l^2))
//   TruncatedRiesz        phi(r2) = (r2 + eps^2)^(-s)
//   TruncatedLog          phi(r2) = -log(r2 + eps^2)
//   TruncatedMultiquadric phi(r2) = (r2 + eps^2)^(-s), s free (no default)
//
// TruncatedRiesz defaults its exponent to (d-2)/2. `weight` scales the whole
// kernel; weight = 0 turns the interaction off, which the samplers use to
// reduce the Gibbs measure to a product law in tests.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  int dim = 1;
  double lengthscale = 1.0;  // Gaussian only
  double epsilon = 0.0;      // truncated families
  double exponent = 0.0;     // Riesz / multiquadric
  double weight = 1.0;

  static KernelSpec gaussian(int dim, double lengthscale = 1.0, double weight = 1.0);
  static KernelSpec truncated_riesz(int dim, double epsilon, double exponent);
  // exponent defaulted to (d-2)/2
  static KernelSpec truncated_riesz(int dim, double epsilon);
  static KernelSpec truncated_log(int dim, double epsilon);
  static KernelSpec truncated_multiquadric(int dim, double epsilon, double exponent);

  void validate() const;  // throws std::invalid_argument
};

double kernel_eval(const KernelSpec& k, std::span<const double> x, std::span<const double> y);

// grad = d/dx K(x, y); `grad` must have size k.dim.
void kernel_grad1(const KernelSpec& k, std::span<const double> x, std::span<const double> y,
                  std::span<double> grad);

// C = sup_x K(x,x); finite for every admitted family.
double kernel_diag_bound(const KernelSpec& k);

// phi and dphi/d(r2), both already scaled by `weight`. The gradient in the
// first argument is 2*(x-y)*kernel_dphi(r2).
double kernel_phi(const KernelSpec& k, double r2);
double kernel_dphi(const KernelSpec& k, double r2);

// Dense Gram matrix G[i*n+j] = K(x_i, x_j), filled from the i<j triangle.
std::vector<double> gram_matrix(const KernelSpec& k, const ParticleConfig& points);

namespace detail {

// Row workhorse shared by the energy and embedding modules: accumulates
//   value += sum_j K(x, p_j)          (j != skip)
//   grad  += sum_j dK/dx (x, p_j)
// over `count` points stored flat at `pts`. For TruncatedLog the value sum is
// evaluated as -log(prod_j (r2_j + eps^2)) with periodic exponent extraction,
// which avoids one log per pair. `grad` may be null. Values are accumulated
// in a fixed order, so row results are independent of the caller's threading.
void kernel_row_accumulate(const KernelSpec& k, const double* x, const double* pts, int count,
                           int skip, double* value, double* grad);

}  // namespace detail

}  // namespace rq
