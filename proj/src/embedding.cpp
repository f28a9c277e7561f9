#include "rq/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace rq {

double EmbeddingEstimate::evaluate(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != dim)
    throw std::invalid_argument("EmbeddingEstimate: dimension mismatch");
  double sum = 0.0;
  detail::kernel_row_accumulate(kernel, z.data(), points.data(), count, -1, &sum, nullptr);
  return sum / count;
}

void EmbeddingEstimate::add_gradient(std::span<const double> z, std::span<double> grad) const {
  if (static_cast<int>(z.size()) != dim || grad.size() != z.size())
    throw std::invalid_argument("EmbeddingEstimate: dimension mismatch");
  std::vector<double> acc(dim, 0.0);
  detail::kernel_row_accumulate(kernel, z.data(), points.data(), count, -1, nullptr, acc.data());
  for (int k = 0; k < dim; ++k) grad[k] += acc[k] / count;
}

EmbeddingEstimate estimate_embedding(const TargetMeasure& target, const KernelSpec& kernel,
                                     int count, double proposal_std, rng::Stream& rng,
                                     double temper) {
  if (count < 1) throw std::invalid_argument("estimate_embedding: count must be >= 1");
  if (kernel.dim != target.dim)
    throw std::invalid_argument("estimate_embedding: kernel/target dimension mismatch");
  EmbeddingEstimate est;
  est.kernel = kernel;
  est.count = count;
  est.dim = target.dim;
  est.points.resize(static_cast<std::size_t>(count) * target.dim);
  const auto init = exact_sample(target, rng);
  auto logd = [&target, temper](std::span<const double> x) {
    return log_density_unnorm(target, x, temper);
  };
  rw_mh_chain(logd, init, count, /*include_init=*/true, proposal_std, rng, est.points.data(),
              target.dim);
  return est;
}

Potential Potential::quadratic(double coeff) {
  Potential v;
  v.mode_ = Mode::Quadratic;
  v.coeff_ = coeff;
  return v;
}

Potential Potential::equilibrated(std::shared_ptr<const EmbeddingEstimate> embedding,
                                  double support_radius) {
  if (!embedding) throw std::invalid_argument("Potential: null embedding");
  if (!(support_radius > 0.0)) throw std::invalid_argument("Potential: support radius must be > 0");
  Potential v;
  v.mode_ = Mode::Equilibrated;
  v.support_radius_ = support_radius;
  v.embedding_ = std::move(embedding);
  return v;
}

double Potential::value(std::span<const double> z) const {
  if (mode_ == Mode::Quadratic) return 0.5 * coeff_ * squared_norm(z);
  const double norm2 = squared_norm(z);
  const double r2 = support_radius_ * support_radius_;
  double v = -embedding_->evaluate(z);
  if (norm2 > r2) v += norm2 - r2;
  return v;
}

std::vector<double> Potential::gradient(std::span<const double> z) const {
  std::vector<double> grad(z.size(), 0.0);
  if (mode_ == Mode::Quadratic) {
    for (std::size_t k = 0; k < z.size(); ++k) grad[k] = coeff_ * z[k];
    return grad;
  }
  embedding_->add_gradient(z, grad);
  for (double& g : grad) g = -g;
  if (squared_norm(z) > support_radius_ * support_radius_)
    for (std::size_t k = 0; k < z.size(); ++k) grad[k] += 2.0 * z[k];
  return grad;
}

void Potential::accumulate(const ParticleConfig& points, double* values, double* grads) const {
  const int n = points.n;
  const int dim = points.dim;
  if (mode_ == Mode::Quadratic) {
    for (int i = 0; i < n; ++i) {
      const double* x = points.coords.data() + static_cast<std::size_t>(i) * dim;
      if (values) values[i] = 0.5 * coeff_ * squared_norm({x, static_cast<std::size_t>(dim)});
      if (grads) {
        double* g = grads + static_cast<std::size_t>(i) * dim;
        for (int k = 0; k < dim; ++k) g[k] += coeff_ * x[k];
      }
    }
    return;
  }
  if (dim != embedding_->dim) throw std::invalid_argument("Potential: dimension mismatch");
  const double r2 = support_radius_ * support_radius_;
  const double inv_count = 1.0 / embedding_->count;
#pragma omp parallel for schedule(static) if (n >= 8)
  for (int i = 0; i < n; ++i) {
    const double* x = points.coords.data() + static_cast<std::size_t>(i) * dim;
    double embed_value = 0.0;
    double* g = grads ? grads + static_cast<std::size_t>(i) * dim : nullptr;
    double gacc[64] = {};
    detail::kernel_row_accumulate(embedding_->kernel, x, embedding_->points.data(),
                                  embedding_->count, -1, values ? &embed_value : nullptr,
                                  g ? gacc : nullptr);
    const double norm2 = squared_norm({x, static_cast<std::size_t>(dim)});
    if (values) {
      double v = -embed_value * inv_count;
      if (norm2 > r2) v += norm2 - r2;
      values[i] = v;
    }
    if (g) {
      const double phi_factor = (norm2 > r2) ? 2.0 : 0.0;
      for (int k = 0; k < dim; ++k) g[k] += phi_factor * x[k] - gacc[k] * inv_count;
    }
  }
}

double potential_value(const Potential& v, std::span<const double> z) { return v.value(z); }

std::vector<double> potential_grad(const Potential& v, std::span<const double> z) {
  return v.gradient(z);
}

}  // namespace rq
