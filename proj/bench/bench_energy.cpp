// Benchmark of the parallel row kernels against the serial reference
// implementation: wall time per Hamiltonian+gradient evaluation and the
// worst absolute disagreement, per kernel family and problem size.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rq/energy.hpp"
#include "rq/rng.hpp"

using namespace rq;

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

ParticleConfig random_config(int n, int dim, std::uint64_t seed) {
  ParticleConfig x(n, dim);
  rng::Stream rng(seed);
  for (double& c : x.coords) c = rng.normal();
  return x;
}

template <class Fn>
double time_best_of(int repeats, const Fn& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const double t0 = now_s();
    fn();
    best = std::min(best, now_s() - t0);
  }
  return best;
}

}  // namespace

int main() {
  const int dim = 2;
  const std::vector<int> sizes = {128, 512, 1024, 2048};
  const std::vector<std::pair<const char*, KernelSpec>> kernels = {
      {"gaussian", KernelSpec::gaussian(dim, 1.0)},
      {"riesz s=1/2", KernelSpec::truncated_riesz(dim, 0.1, 0.5)},
      {"log", KernelSpec::truncated_log(dim, 0.01)},
      {"multiquadric s=1", KernelSpec::truncated_multiquadric(dim, 0.1, 1.0)},
  };
  const Potential v = Potential::quadratic();

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("%-18s %6s %12s %12s %8s %12s\n", "kernel", "n", "parallel[ms]", "serial[ms]",
              "speedup", "max|diff|");

  for (const auto& [name, kernel] : kernels) {
    for (int n : sizes) {
      const auto x = random_config(n, dim, 12345 + n);
      HamiltonianEval par_eval, ser_eval;
      const int repeats = n <= 512 ? 5 : 3;
      const double t_par =
          time_best_of(repeats, [&] { par_eval = hamiltonian_with_grad(x, kernel, v); });
      double t_ser;
      {
        EnergyBreakdown e;
        std::vector<double> g;
        t_ser = time_best_of(repeats, [&] {
          e = serial_ref::hamiltonian(x, kernel, v);
          g = serial_ref::grad_hamiltonian(x, kernel, v);
        });
        ser_eval.energy = e;
        ser_eval.grad = std::move(g);
      }
      double max_diff = std::abs(par_eval.energy.total - ser_eval.energy.total);
      for (std::size_t i = 0; i < ser_eval.grad.size(); ++i)
        max_diff = std::max(max_diff, std::abs(par_eval.grad[i] - ser_eval.grad[i]));
      std::printf("%-18s %6d %12.3f %12.3f %8.2f %12.3e\n", name, n, 1e3 * t_par, 1e3 * t_ser,
                  t_ser / t_par, max_diff);
    }
  }
  return 0;
}
