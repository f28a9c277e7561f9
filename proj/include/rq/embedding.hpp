#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rq/kernels.hpp"
#include "rq/measures.hpp"
#include "rq/particles.hpp"
#include "rq/rng.hpp"

namespace rq {

// Monte Carlo estimate of the kernel embedding z -> int K(z,y) dpi(y):
// reference points z_1..z_M from an MH chain targeting pi, so that
// U_hat(z) = M^-1 sum_m K(z, z_m).
struct EmbeddingEstimate {
  KernelSpec kernel;
  int count = 0;  // M
  int dim = 0;
  std::vector<double> points;  // M x dim, row-major

  double evaluate(std::span<const double> z) const;
  // grad += d/dz U_hat(z)
  void add_gradient(std::span<const double> z, std::span<double> grad) const;
};

// Runs a random-walk MH chain of length M targeting pi (optionally tempered
// as pi^temper) and stores every state, the first one being an exact draw
// from pi. No thinning: averaging over the correlated states is the
// estimator.
EmbeddingEstimate estimate_embedding(const TargetMeasure& target, const KernelSpec& kernel,
                                     int count, double proposal_std, rng::Stream& rng,
                                     double temper = 1.0);

// Confining potential for the Gibbs measure. Two modes:
//  - quadratic:      V(x) = 0.5 * coeff * |x|^2
//  - equilibrated:   V(z) = -U_hat(z) + Phi(z),  Phi(z) = (|z|^2 - R^2)+ outside
//                    B(0,R), zero inside, so that the equilibrium measure of
//                    the Gibbs dynamics is the target pi that U_hat estimates.
// Phi vanishes on the sphere |z| = R, which keeps V continuous there; the
// gradient uses the inside branch (zero Phi-gradient) at |z| = R exactly.
class Potential {
 public:
  enum class Mode { Quadratic, Equilibrated };

  static Potential quadratic(double coeff = 1.0);
  static Potential equilibrated(std::shared_ptr<const EmbeddingEstimate> embedding,
                                double support_radius);

  Mode mode() const { return mode_; }
  double support_radius() const { return support_radius_; }
  const EmbeddingEstimate* embedding() const { return embedding_.get(); }

  double value(std::span<const double> z) const;
  std::vector<double> gradient(std::span<const double> z) const;

  // Fused batch evaluation over all points of a configuration:
  //   values[i]    = V(x_i)                  (if values != nullptr)
  //   grads[i*d..] += dV/dx (x_i)            (if grads  != nullptr)
  // Rows are independent and run in parallel in equilibrated mode; each row
  // is accumulated serially, so results do not depend on the thread count.
  void accumulate(const ParticleConfig& points, double* values, double* grads) const;

 private:
  Mode mode_ = Mode::Quadratic;
  double coeff_ = 1.0;
  double support_radius_ = 0.0;
  std::shared_ptr<const EmbeddingEstimate> embedding_;
};

double potential_value(const Potential& v, std::span<const double> z);
std::vector<double> potential_grad(const Potential& v, std::span<const double> z);

}  // namespace rq
