#include "rq/measures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rq/particles.hpp"

namespace rq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kRejectionBudget = 1000000;

}  // namespace

std::string target_family_name(TargetFamily family) {
  switch (family) {
    case TargetFamily::UniformBall: return "uniform_ball";
    case TargetFamily::TruncatedGaussian: return "truncated_gaussian";
    case TargetFamily::TruncatedGaussianMixture: return "truncated_gaussian_mixture";
  }
  return "unknown";
}

TargetMeasure TargetMeasure::uniform_ball(int dim, double radius) {
  TargetMeasure t;
  t.family = TargetFamily::UniformBall;
  t.dim = dim;
  t.radius = radius;
  t.validate();
  return t;
}

TargetMeasure TargetMeasure::truncated_gaussian(std::vector<double> center, double variance,
                                                double trunc_radius) {
  TargetMeasure t;
  t.family = TargetFamily::TruncatedGaussian;
  t.dim = static_cast<int>(center.size());
  GaussianComponent comp;
  comp.center = std::move(center);
  comp.variance = variance;
  comp.trunc_radius = trunc_radius;
  comp.weight = 1.0;
  double center_norm = 0.0;
  for (double c : comp.center) center_norm += c * c;
  t.radius = std::sqrt(center_norm) + trunc_radius;
  t.components.push_back(std::move(comp));
  t.validate();
  return t;
}

TargetMeasure TargetMeasure::gaussian_mixture(std::vector<GaussianComponent> components) {
  TargetMeasure t;
  t.family = TargetFamily::TruncatedGaussianMixture;
  if (components.empty())
    throw std::invalid_argument("TargetMeasure: mixture needs at least one component");
  t.dim = static_cast<int>(components.front().center.size());
  double enclosing = 0.0;
  for (const auto& comp : components) {
    double center_norm = 0.0;
    for (double c : comp.center) center_norm += c * c;
    enclosing = std::max(enclosing, std::sqrt(center_norm) + comp.trunc_radius);
  }
  t.radius = enclosing;
  t.components = std::move(components);
  t.validate();
  return t;
}

void TargetMeasure::validate() const {
  if (dim < 1) throw std::invalid_argument("TargetMeasure: dim must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("TargetMeasure: support radius must be > 0");
  if (family == TargetFamily::UniformBall) {
    if (!components.empty()) throw std::invalid_argument("TargetMeasure: uniform ball takes no components");
    return;
  }
  if (components.empty()) throw std::invalid_argument("TargetMeasure: missing components");
  if (family == TargetFamily::TruncatedGaussian && components.size() != 1)
    throw std::invalid_argument("TargetMeasure: truncated Gaussian takes exactly one component");
  double weight_sum = 0.0;
  for (const auto& comp : components) {
    if (static_cast<int>(comp.center.size()) != dim)
      throw std::invalid_argument("TargetMeasure: component center dimension mismatch");
    if (!(comp.variance > 0.0)) throw std::invalid_argument("TargetMeasure: variance must be > 0");
    if (!(comp.trunc_radius > 0.0))
      throw std::invalid_argument("TargetMeasure: truncation radius must be > 0");
    if (!(comp.weight >= 0.0)) throw std::invalid_argument("TargetMeasure: weights must be >= 0");
    weight_sum += comp.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw std::invalid_argument("TargetMeasure: mixture weights must sum to 1");
}

TargetMeasure mixture_on_circle(int count, double trunc_radius, double variance,
                                double circle_radius) {
  if (count < 1) throw std::invalid_argument("mixture_on_circle: count must be >= 1");
  std::vector<GaussianComponent> components;
  components.reserve(count);
  for (int j = 0; j < count; ++j) {
    const double angle = 2.0 * M_PI * j / count;
    GaussianComponent comp;
    comp.center = {circle_radius * std::cos(angle), circle_radius * std::sin(angle)};
    comp.variance = variance;
    comp.trunc_radius = trunc_radius;
    comp.weight = 1.0 / count;
    components.push_back(std::move(comp));
  }
  auto t = TargetMeasure::gaussian_mixture(std::move(components));
  return t;
}

double log_density_unnorm(const TargetMeasure& t, std::span<const double> x) {
  if (static_cast<int>(x.size()) != t.dim)
    throw std::invalid_argument("log_density_unnorm: dimension mismatch");
  switch (t.family) {
    case TargetFamily::UniformBall:
      return squared_norm(x) <= t.radius * t.radius ? 0.0 : kNegInf;
    case TargetFamily::TruncatedGaussian: {
      const auto& comp = t.components.front();
      const double r2 = squared_distance(x, comp.center);
      if (r2 > comp.trunc_radius * comp.trunc_radius) return kNegInf;
      return -0.5 * r2 / comp.variance;
    }
    case TargetFamily::TruncatedGaussianMixture: {
      // log-sum-exp over the components whose truncation ball contains x;
      // the sigma^-d factors keep relative component masses right if the
      // variances ever differ.
      double max_term = kNegInf;
      thread_local std::vector<double> terms;
      terms.clear();
      for (const auto& comp : t.components) {
        const double r2 = squared_distance(x, comp.center);
        if (r2 > comp.trunc_radius * comp.trunc_radius || comp.weight == 0.0) continue;
        const double term = std::log(comp.weight) - 0.5 * t.dim * std::log(comp.variance) -
                            0.5 * r2 / comp.variance;
        terms.push_back(term);
        max_term = std::max(max_term, term);
      }
      if (terms.empty()) return kNegInf;
      double acc = 0.0;
      for (double term : terms) acc += std::exp(term - max_term);
      return max_term + std::log(acc);
    }
  }
  return kNegInf;
}

double log_density_unnorm(const TargetMeasure& t, std::span<const double> x, double temper) {
  const double base = log_density_unnorm(t, x);
  return std::isfinite(base) ? temper * base : base;
}

namespace {

std::vector<double> sample_component(const GaussianComponent& comp, int dim, rng::Stream& rng) {
  const double sd = std::sqrt(comp.variance);
  std::vector<double> x(dim);
  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double offset = sd * rng.normal();
      x[k] = comp.center[k] + offset;
      r2 += offset * offset;
    }
    if (r2 <= comp.trunc_radius * comp.trunc_radius) return x;
  }
  throw SamplingError("exact_sample: truncated Gaussian rejection budget exceeded");
}

}  // namespace

std::vector<double> exact_sample(const TargetMeasure& t, rng::Stream& rng) {
  switch (t.family) {
    case TargetFamily::UniformBall: {
      std::vector<double> x(t.dim);
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (int k = 0; k < t.dim; ++k) {
          x[k] = rng.normal();
          norm2 += x[k] * x[k];
        }
      } while (norm2 == 0.0);
      const double r = t.radius * std::pow(rng.uniform_pos(), 1.0 / t.dim);
      const double scale = r / std::sqrt(norm2);
      for (double& v : x) v *= scale;
      return x;
    }
    case TargetFamily::TruncatedGaussian:
      return sample_component(t.components.front(), t.dim, rng);
    case TargetFamily::TruncatedGaussianMixture: {
      const double u = rng.uniform01();
      double acc = 0.0;
      for (const auto& comp : t.components) {
        acc += comp.weight;
        if (u < acc) return sample_component(comp, t.dim, rng);
      }
      return sample_component(t.components.back(), t.dim, rng);
    }
  }
  throw SamplingError("exact_sample: unknown family");
}

long rw_mh_chain(const std::function<double(std::span<const double>)>& log_density,
                 std::span<const double> x0, int count, bool include_init, double proposal_std,
                 rng::Stream& rng, double* out, int dim) {
  if (count < 1) throw std::invalid_argument("rw_mh_chain: count must be >= 1");
  std::vector<double> current(x0.begin(), x0.end());
  std::vector<double> proposal(dim);
  double current_logp = log_density(current);
  long accepted = 0;
  int written = 0;
  if (include_init) {
    std::copy(current.begin(), current.end(), out);
    written = 1;
  }
  while (written < count) {
    for (int k = 0; k < dim; ++k) proposal[k] = current[k] + proposal_std * rng.normal();
    const double proposal_logp = log_density(proposal);
    const double log_ratio = proposal_logp - current_logp;
    if (log_ratio >= 0.0 || std::log(rng.uniform_pos()) < log_ratio) {
      current.swap(proposal);
      current_logp = proposal_logp;
      ++accepted;
    }
    std::copy(current.begin(), current.end(), out + static_cast<std::size_t>(written) * dim);
    ++written;
  }
  return accepted;
}

}  // namespace rq
