#include "rq/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rq {

namespace {

// Neumaier-compensated sum; the row partials are combined with it so that the
// 1e-12 oracle tolerances hold at every configuration size.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double result() const { return sum + comp; }
};

void check_pair(const ParticleConfig& x, const KernelSpec& k) {
  if (x.dim != k.dim) throw std::invalid_argument("energy: config/kernel dimension mismatch");
  if (x.n < 1) throw std::invalid_argument("energy: empty configuration");
}

// Scalars are accumulated over the canonically sorted copy of the
// configuration, which makes hamiltonian() and interaction_energy() exactly
// permutation invariant. Gradient rows are scattered back through the
// permutation.
struct SortedView {
  std::vector<int> order;
  ParticleConfig sorted;
  explicit SortedView(const ParticleConfig& x) : order(canonical_order(x)), sorted(reorder(x, order)) {}
};

HamiltonianEval hamiltonian_impl(const ParticleConfig& x, const KernelSpec& k, const Potential& v,
                                 bool want_grad) {
  check_pair(x, k);
  const int n = x.n;
  const int dim = x.dim;
  const SortedView view(x);
  const double* pts = view.sorted.coords.data();

  std::vector<double> pair_sum(n, 0.0);
  std::vector<double> pot_value(n, 0.0);
  std::vector<double> pair_grad(want_grad ? static_cast<std::size_t>(n) * dim : 0, 0.0);
  std::vector<double> pot_grad(want_grad ? static_cast<std::size_t>(n) * dim : 0, 0.0);

#pragma omp parallel for schedule(static) if (n >= 64)
  for (int i = 0; i < n; ++i) {
    const double* xi = pts + static_cast<std::size_t>(i) * dim;
    double* grad_row = want_grad ? pair_grad.data() + static_cast<std::size_t>(i) * dim : nullptr;
    detail::kernel_row_accumulate(k, xi, pts, n, i, &pair_sum[i], grad_row);
  }

  v.accumulate(view.sorted, pot_value.data(), want_grad ? pot_grad.data() : nullptr);

  CompensatedSum interaction_acc;
  CompensatedSum confinement_acc;
  for (int i = 0; i < n; ++i) {
    interaction_acc.add(pair_sum[i]);
    confinement_acc.add(pot_value[i]);
  }
  const double inv_n = 1.0 / n;
  const double inv_n2 = inv_n * inv_n;

  HamiltonianEval out;
  out.energy.interaction = 0.5 * inv_n2 * interaction_acc.result();
  out.energy.confinement = inv_n * confinement_acc.result();
  out.energy.total = out.energy.interaction + out.energy.confinement;
  if (want_grad) {
    out.grad.assign(static_cast<std::size_t>(n) * dim, 0.0);
    for (int i = 0; i < n; ++i) {
      double* dst = out.grad.data() + static_cast<std::size_t>(view.order[i]) * dim;
      const double* gp = pair_grad.data() + static_cast<std::size_t>(i) * dim;
      const double* gv = pot_grad.data() + static_cast<std::size_t>(i) * dim;
      for (int c = 0; c < dim; ++c) dst[c] = inv_n2 * gp[c] + inv_n * gv[c];
    }
  }
  return out;
}

// Sum of full kernel rows (diagonal included) over sorted points, divided by
// n*m. Used by both self- and cross-interaction energies so that the two
// agree bitwise on identical inputs.
double mean_kernel_sum(const ParticleConfig& sorted_x, const ParticleConfig& sorted_y,
                       const KernelSpec& k) {
  const int n = sorted_x.n;
  const int m = sorted_y.n;
  std::vector<double> row(n, 0.0);
  const double* xs = sorted_x.coords.data();
  const double* ys = sorted_y.coords.data();
#pragma omp parallel for schedule(static) if (n >= 64)
  for (int i = 0; i < n; ++i) {
    detail::kernel_row_accumulate(k, xs + static_cast<std::size_t>(i) * k.dim, ys, m, -1, &row[i],
                                  nullptr);
  }
  CompensatedSum acc;
  for (int i = 0; i < n; ++i) acc.add(row[i]);
  return acc.result() / (static_cast<double>(n) * static_cast<double>(m));
}

// Deterministic operand order: by size first, then lexicographically on the
// sorted coordinate buffers. Makes mmd_squared(X,Y) == mmd_squared(Y,X) bit
// for bit.
bool first_operand(const ParticleConfig& a, const ParticleConfig& b) {
  if (a.n != b.n) return a.n < b.n;
  return !std::lexicographical_compare(b.coords.begin(), b.coords.end(), a.coords.begin(),
                                       a.coords.end());
}

}  // namespace

EnergyBreakdown hamiltonian(const ParticleConfig& x, const KernelSpec& k, const Potential& v) {
  return hamiltonian_impl(x, k, v, false).energy;
}

std::vector<double> grad_hamiltonian(const ParticleConfig& x, const KernelSpec& k,
                                     const Potential& v) {
  return hamiltonian_impl(x, k, v, true).grad;
}

HamiltonianEval hamiltonian_with_grad(const ParticleConfig& x, const KernelSpec& k,
                                      const Potential& v) {
  return hamiltonian_impl(x, k, v, true);
}

double interaction_energy(const ParticleConfig& x, const KernelSpec& k) {
  check_pair(x, k);
  const SortedView view(x);
  return mean_kernel_sum(view.sorted, view.sorted, k);
}

double cross_energy(const ParticleConfig& x, const ParticleConfig& y, const KernelSpec& k) {
  check_pair(x, k);
  check_pair(y, k);
  const SortedView vx(x);
  const SortedView vy(y);
  return mean_kernel_sum(vx.sorted, vy.sorted, k);
}

double mmd_squared(const ParticleConfig& x, const ParticleConfig& y, const KernelSpec& k) {
  check_pair(x, k);
  check_pair(y, k);
  const SortedView vx(x);
  const SortedView vy(y);
  const bool x_first = first_operand(vx.sorted, vy.sorted);
  const ParticleConfig& a = x_first ? vx.sorted : vy.sorted;
  const ParticleConfig& b = x_first ? vy.sorted : vx.sorted;
  const double self_a = mean_kernel_sum(a, a, k);
  const double self_b = mean_kernel_sum(b, b, k);
  const double cross = mean_kernel_sum(a, b, k);
  return self_a - 2.0 * cross + self_b;
}

namespace serial_ref {

EnergyBreakdown hamiltonian(const ParticleConfig& x, const KernelSpec& k, const Potential& v) {
  const int n = x.n;
  double pair = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) pair += kernel_eval(k, x.point(i), x.point(j));
  double conf = 0.0;
  for (int i = 0; i < n; ++i) conf += v.value(x.point(i));
  EnergyBreakdown e;
  e.interaction = pair / (2.0 * n * n);
  e.confinement = conf / n;
  e.total = e.interaction + e.confinement;
  return e;
}

std::vector<double> grad_hamiltonian(const ParticleConfig& x, const KernelSpec& k,
                                     const Potential& v) {
  const int n = x.n;
  const int dim = x.dim;
  std::vector<double> grad(static_cast<std::size_t>(n) * dim, 0.0);
  std::vector<double> pair(dim);
  for (int i = 0; i < n; ++i) {
    double* row = grad.data() + static_cast<std::size_t>(i) * dim;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      kernel_grad1(k, x.point(i), x.point(j), pair);
      for (int c = 0; c < dim; ++c) row[c] += pair[c] / (static_cast<double>(n) * n);
    }
    const auto vg = v.gradient(x.point(i));
    for (int c = 0; c < dim; ++c) row[c] += vg[c] / n;
  }
  return grad;
}

double interaction_energy(const ParticleConfig& x, const KernelSpec& k) {
  double sum = 0.0;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) sum += kernel_eval(k, x.point(i), x.point(j));
  return sum / (static_cast<double>(x.n) * x.n);
}

double cross_energy(const ParticleConfig& x, const ParticleConfig& y, const KernelSpec& k) {
  double sum = 0.0;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < y.n; ++j) sum += kernel_eval(k, x.point(i), y.point(j));
  return sum / (static_cast<double>(x.n) * y.n);
}

double mmd_squared(const ParticleConfig& x, const ParticleConfig& y, const KernelSpec& k) {
  return serial_ref::interaction_energy(x, k) - 2.0 * serial_ref::cross_energy(x, y, k) +
         serial_ref::interaction_energy(y, k);
}

}  // namespace serial_ref

}  // namespace rq
