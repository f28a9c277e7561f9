#pragma once

#include <vector>

#include "rq/embedding.hpp"
#include "rq/kernels.hpp"
#include "rq/particles.hpp"

namespace rq {

// The two summands of H_n(X) = (1/2n^2) sum_{i != j} K(x_i, x_j)
//                            + (1/n)    sum_i V(x_i).
// The pairwise term excludes the diagonal; interaction_energy() below keeps
// it adds it back, being the energy of the empirical measure. Both
// conventions are wanted in different places, so they are kept explicit here.
struct EnergyBreakdown {
  double interaction = 0.0;
  double confinement = 0.0;
  double total = 0.0;
};

struct HamiltonianEval {
  EnergyBreakdown energy;
  std::vector<double> grad;  // n x dim, row-major
};

EnergyBreakdown hamiltonian(const ParticleConfig& x, const KernelSpec& k, const Potential& v);

// Component i is (1/n^2) sum_{j != i} dK/dx (x_i, x_j) + (1/n) dV/dx (x_i).
std::vector<double> grad_hamiltonian(const ParticleConfig& x, const KernelSpec& k,
                                     const Potential& v);

// One fused pass for the MALA loop: energy and gradient share the pairwise
// sweep.
HamiltonianEval hamiltonian_with_grad(const ParticleConfig& x, const KernelSpec& k,
                                      const Potential& v);

// I_K(mu_X) = (1/n^2) sum over all ordered pairs, diagonal included.
double interaction_energy(const ParticleConfig& x, const KernelSpec& k);

// I_K(mu_X, mu_Y) = (1/nm) sum_i sum_j K(x_i, y_j).
double cross_energy(const ParticleConfig& x, const ParticleConfig& y, const KernelSpec& k);

// I_K(mu_X - mu_Y) = I(X) - 2 I(X,Y) + I(Y); its square root is the
// worst-case integration error over the unit ball of the kernel's RKHS.
double mmd_squared(const ParticleConfig& x, const ParticleConfig& y, const KernelSpec& k);

// Straightforward double-loop implementations, kept as the reference for the
// parallel row kernels above; used by the benchmark and the agreement tests.
namespace serial_ref {
EnergyBreakdown hamiltonian(const ParticleConfig& x, const KernelSpec& k, const Potential& v);
std::vector<double> grad_hamiltonian(const ParticleConfig& x, const KernelSpec& k,
                                     const Potential& v);
double interaction_energy(const ParticleConfig& x, const KernelSpec& k);
double cross_energy(const ParticleConfig& x, const ParticleConfig& y, const KernelSpec& k);
double mmd_squared(const ParticleConfig& x, const ParticleConfig& y, const KernelSpec& k);
}  // namespace serial_ref

}  // namespace rq
