#include "rq/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace rq {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

void check_dims(const KernelSpec& k, std::span<const double> x, std::span<const double> y) {
  if (static_cast<int>(x.size()) != k.dim || static_cast<int>(y.size()) != k.dim)
    throw std::invalid_argument("kernel: point dimension does not match KernelSpec::dim");
}

// (r2 + eps^2)^(-s) with fast paths for the integer and half-integer
// exponents that the experiments actually use (s = (d-2)/2).
inline double pow_neg(double t, double s) {
  const double rounded = std::nearbyint(2.0 * s);
  if (rounded == 2.0 * s && rounded >= 0.0 && rounded <= 16.0) {
    const int twos = static_cast<int>(rounded);
    double base = (twos & 1) ? std::sqrt(t) : 1.0;
    double acc = base;
    for (int i = 0; i < twos / 2; ++i) acc *= t;
    return (twos == 0) ? 1.0 : 1.0 / acc;
  }
  return std::pow(t, -s);
}

}  // namespace

std::string kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::TruncatedRiesz: return "truncated_riesz";
    case KernelFamily::TruncatedLog: return "truncated_log";
    case KernelFamily::TruncatedMultiquadric: return "truncated_multiquadric";
  }
  return "unknown";
}

KernelSpec KernelSpec::gaussian(int dim, double lengthscale, double weight) {
  KernelSpec k;
  k.family = KernelFamily::Gaussian;
  k.dim = dim;
  k.lengthscale = lengthscale;
  k.weight = weight;
  k.validate();
  return k;
}

KernelSpec KernelSpec::truncated_riesz(int dim, double epsilon, double exponent) {
  KernelSpec k;
  k.family = KernelFamily::TruncatedRiesz;
  k.dim = dim;
  k.epsilon = epsilon;
  k.exponent = exponent;
  k.validate();
  return k;
}

KernelSpec KernelSpec::truncated_riesz(int dim, double epsilon) {
  return truncated_riesz(dim, epsilon, 0.5 * (dim - 2));
}

KernelSpec KernelSpec::truncated_log(int dim, double epsilon) {
  KernelSpec k;
  k.family = KernelFamily::TruncatedLog;
  k.dim = dim;
  k.epsilon = epsilon;
  k.validate();
  return k;
}

KernelSpec KernelSpec::truncated_multiquadric(int dim, double epsilon, double exponent) {
  KernelSpec k;
  k.family = KernelFamily::TruncatedMultiquadric;
  k.dim = dim;
  k.epsilon = epsilon;
  k.exponent = exponent;
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("KernelSpec: dim must be >= 1");
  if (!(weight >= 0.0)) throw std::invalid_argument("KernelSpec: weight must be >= 0");
  if (family == KernelFamily::Gaussian) {
    if (!(lengthscale > 0.0)) throw std::invalid_argument("KernelSpec: lengthscale must be > 0");
  } else {
    if (!(epsilon > 0.0)) throw std::invalid_argument("KernelSpec: epsilon must be > 0 for truncated families");
  }
}

double kernel_phi(const KernelSpec& k, double r2) {
  switch (k.family) {
    case KernelFamily::Gaussian:
      return k.weight * std::exp(-0.5 * r2 / (k.lengthscale * k.lengthscale));
    case KernelFamily::TruncatedRiesz:
    case KernelFamily::TruncatedMultiquadric:
      return k.weight * pow_neg(r2 + k.epsilon * k.epsilon, k.exponent);
    case KernelFamily::TruncatedLog:
      return -k.weight * std::log(r2 + k.epsilon * k.epsilon);
  }
  return 0.0;
}

double kernel_dphi(const KernelSpec& k, double r2) {
  switch (k.family) {
    case KernelFamily::Gaussian: {
      const double c = -0.5 / (k.lengthscale * k.lengthscale);
      return c * k.weight * std::exp(c * r2);
    }
    case KernelFamily::TruncatedRiesz:
    case KernelFamily::TruncatedMultiquadric: {
      const double t = r2 + k.epsilon * k.epsilon;
      return -k.exponent * k.weight * pow_neg(t, k.exponent) / t;
    }
    case KernelFamily::TruncatedLog:
      return -k.weight / (r2 + k.epsilon * k.epsilon);
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& k, std::span<const double> x, std::span<const double> y) {
  check_dims(k, x, y);
  return kernel_phi(k, squared_distance(x, y));
}

void kernel_grad1(const KernelSpec& k, std::span<const double> x, std::span<const double> y,
                  std::span<double> grad) {
  check_dims(k, x, y);
  if (grad.size() != x.size()) throw std::invalid_argument("kernel_grad1: bad gradient size");
  const double g = 2.0 * kernel_dphi(k, squared_distance(x, y));
  for (int i = 0; i < k.dim; ++i) grad[i] = g * (x[i] - y[i]);
}

double kernel_diag_bound(const KernelSpec& k) {
  switch (k.family) {
    case KernelFamily::Gaussian:
      return k.weight;
    case KernelFamily::TruncatedRiesz:
    case KernelFamily::TruncatedMultiquadric:
      return k.weight * pow_neg(k.epsilon * k.epsilon, k.exponent);
    case KernelFamily::TruncatedLog:
      return -2.0 * k.weight * std::log(k.epsilon);
  }
  return 0.0;
}

std::vector<double> gram_matrix(const KernelSpec& k, const ParticleConfig& points) {
  if (points.dim != k.dim) throw std::invalid_argument("gram_matrix: dimension mismatch");
  const int n = points.n;
  std::vector<double> gram(static_cast<std::size_t>(n) * n);
  const double diag = kernel_phi(k, 0.0);
  for (int i = 0; i < n; ++i) {
    gram[static_cast<std::size_t>(i) * n + i] = diag;
    for (int j = i + 1; j < n; ++j) {
      const double v = kernel_phi(k, squared_distance(points.point(i), points.point(j)));
      gram[static_cast<std::size_t>(i) * n + j] = v;
      gram[static_cast<std::size_t>(j) * n + i] = v;
    }
  }
  return gram;
}

// ---------------------------------------------------------------------------
// Row accumulators. These are the inner loops of every Hamiltonian, gradient
// and embedding evaluation, so each family gets a branch-free blocked loop,
// with the point dimension specialized for d = 2 and d = 3.
// ---------------------------------------------------------------------------

namespace {

struct GaussianOp {
  double c;  // -1/(2 l^2)
  static constexpr bool log_product = false;
  double value_term(double r2) const { return std::exp(c * r2); }
  // gradient factor g such that dK/dx = g * (x - y), before `weight`
  double grad_factor(double r2) const { return 2.0 * c * std::exp(c * r2); }
};

struct RieszOp {
  double e2;
  double s;
  static constexpr bool log_product = false;
  double value_term(double r2) const { return pow_neg(r2 + e2, s); }
  double grad_factor(double r2) const {
    const double t = r2 + e2;
    return -2.0 * s * pow_neg(t, s) / t;
  }
};

// Inverse square root is by far the most common Riesz case (s = 1/2 in
// d = 3); keeping it free of pow() calls matters in the MALA hot loop.
struct RieszHalfOp {
  double e2;
  static constexpr bool log_product = false;
  double value_term(double r2) const { return 1.0 / std::sqrt(r2 + e2); }
  double grad_factor(double r2) const {
    const double t = r2 + e2;
    return -1.0 / (t * std::sqrt(t));
  }
};

struct LogOp {
  double e2;
  static constexpr bool log_product = true;
  double shifted(double r2) const { return r2 + e2; }
};

template <int D>
inline double row_sqdist(const double* x, const double* p) {
  if constexpr (D == 2) {
    const double d0 = x[0] - p[0], d1 = x[1] - p[1];
    return d0 * d0 + d1 * d1;
  } else if constexpr (D == 3) {
    const double d0 = x[0] - p[0], d1 = x[1] - p[1], d2 = x[2] - p[2];
    return d0 * d0 + d1 * d1 + d2 * d2;
  }
  return 0.0;
}

// Plain families: straight sum of phi terms plus gradient accumulation.
template <int D, class Op>
void range_accumulate(const Op& op, const double* x, const double* pts, int dim, int begin, int end,
                      double* value, double* gacc) {
  double vsum = 0.0;
  if constexpr (D > 0) {
    for (int j = begin; j < end; ++j) {
      const double* p = pts + static_cast<std::size_t>(j) * D;
      const double r2 = row_sqdist<D>(x, p);
      if (value) vsum += op.value_term(r2);
      if (gacc) {
        const double g = op.grad_factor(r2);
        for (int k = 0; k < D; ++k) gacc[k] += g * (x[k] - p[k]);
      }
    }
  } else {
    for (int j = begin; j < end; ++j) {
      const double* p = pts + static_cast<std::size_t>(j) * dim;
      double r2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double dk = x[k] - p[k];
        r2 += dk * dk;
      }
      if (value) vsum += op.value_term(r2);
      if (gacc) {
        const double g = op.grad_factor(r2);
        for (int k = 0; k < dim; ++k) gacc[k] += g * (x[k] - p[k]);
      }
    }
  }
  if (value) *value += vsum;
}

// TruncatedLog: sum_j -log(r2_j + e2) evaluated as -log of a running product,
// with the exponent pulled out after every block to keep the mantissa in
// range. One log call per 16 pairs instead of one per pair.
template <int D>
void range_accumulate_log(const LogOp& op, const double* x, const double* pts, int dim, int begin,
                          int end, double* value, double* gacc) {
  constexpr int kBlock = 16;
  double mantissa = 1.0;
  long exponent = 0;
  int j = begin;
  const int dd = (D > 0) ? D : dim;
  while (j < end) {
    const int blk = std::min(kBlock, end - j);
    double p0 = 1.0, p1 = 1.0;
    for (int u = 0; u < blk; ++u) {
      const double* p = pts + static_cast<std::size_t>(j + u) * dd;
      double r2;
      if constexpr (D > 0) {
        r2 = row_sqdist<D>(x, p);
      } else {
        r2 = 0.0;
        for (int k = 0; k < dd; ++k) {
          const double dk = x[k] - p[k];
          r2 += dk * dk;
        }
      }
      const double t = op.shifted(r2);
      if (u & 1)
        p1 *= t;
      else
        p0 *= t;
      if (gacc) {
        const double inv = 1.0 / t;
        for (int k = 0; k < dd; ++k) gacc[k] += inv * (x[k] - p[k]);
      }
    }
    int e;
    mantissa = std::frexp(mantissa * p0 * p1, &e);
    exponent += e;
    j += blk;
  }
  if (value) *value += -(std::log(mantissa) + static_cast<double>(exponent) * kLn2);
}

template <int D, class Op>
void row_dispatch(const Op& op, const double* x, const double* pts, int count, int skip, int dim,
                  double* value, double* gacc) {
  const int cut = (skip >= 0 && skip < count) ? skip : count;
  if constexpr (Op::log_product) {
    range_accumulate_log<D>(op, x, pts, dim, 0, cut, value, gacc);
    if (cut < count) range_accumulate_log<D>(op, x, pts, dim, cut + 1, count, value, gacc);
  } else {
    range_accumulate<D>(op, x, pts, dim, 0, cut, value, gacc);
    if (cut < count) range_accumulate<D>(op, x, pts, dim, cut + 1, count, value, gacc);
  }
}

template <class Op>
void row_for_dim(const Op& op, const double* x, const double* pts, int count, int skip, int dim,
                 double* value, double* gacc) {
  switch (dim) {
    case 2: row_dispatch<2>(op, x, pts, count, skip, dim, value, gacc); break;
    case 3: row_dispatch<3>(op, x, pts, count, skip, dim, value, gacc); break;
    default: row_dispatch<0>(op, x, pts, count, skip, dim, value, gacc); break;
  }
}

}  // namespace

namespace detail {

void kernel_row_accumulate(const KernelSpec& k, const double* x, const double* pts, int count,
                           int skip, double* value, double* grad) {
  if (count <= 0 || k.weight == 0.0) return;
  const int dim = k.dim;
  double raw_value = 0.0;
  double gacc_buf[64];
  double* gacc = nullptr;
  if (grad) {
    if (dim > 64) throw std::invalid_argument("kernel_row_accumulate: dim > 64 unsupported");
    for (int i = 0; i < dim; ++i) gacc_buf[i] = 0.0;
    gacc = gacc_buf;
  }
  double* vptr = value ? &raw_value : nullptr;

  switch (k.family) {
    case KernelFamily::Gaussian: {
      GaussianOp op{-0.5 / (k.lengthscale * k.lengthscale)};
      row_for_dim(op, x, pts, count, skip, dim, vptr, gacc);
      if (grad)
        for (int i = 0; i < dim; ++i) grad[i] += k.weight * gacc[i];
      break;
    }
    case KernelFamily::TruncatedRiesz:
    case KernelFamily::TruncatedMultiquadric: {
      const double e2 = k.epsilon * k.epsilon;
      if (k.exponent == 0.5) {
        RieszHalfOp op{e2};
        row_for_dim(op, x, pts, count, skip, dim, vptr, gacc);
      } else {
        RieszOp op{e2, k.exponent};
        row_for_dim(op, x, pts, count, skip, dim, vptr, gacc);
      }
      if (grad)
        for (int i = 0; i < dim; ++i) grad[i] += k.weight * gacc[i];
      break;
    }
    case KernelFamily::TruncatedLog: {
      LogOp op{k.epsilon * k.epsilon};
      row_for_dim(op, x, pts, count, skip, dim, vptr, gacc);
      // the log-product loop accumulates sum inv*(x-p); dK/dx = -2*(x-p)/t
      if (grad)
        for (int i = 0; i < dim; ++i) grad[i] += -2.0 * k.weight * gacc[i];
      break;
    }
  }
  if (value) *value += k.weight * raw_value;
}

}  // namespace detail

}  // namespace rq
