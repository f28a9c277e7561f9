#include "rq/particles.hpp"

#include <algorithm>
#include <numeric>

namespace rq {

std::vector<int> canonical_order(const ParticleConfig& config) {
  std::vector<int> order(config.n);
  std::iota(order.begin(), order.end(), 0);
  const double* coords = config.coords.data();
  const int dim = config.dim;
  std::sort(order.begin(), order.end(), [coords, dim](int a, int b) {
    const double* pa = coords + static_cast<std::size_t>(a) * dim;
    const double* pb = coords + static_cast<std::size_t>(b) * dim;
    return std::lexicographical_compare(pa, pa + dim, pb, pb + dim);
  });
  return order;
}

ParticleConfig reorder(const ParticleConfig& config, const std::vector<int>& order) {
  ParticleConfig out(config.n, config.dim);
  for (int i = 0; i < config.n; ++i) {
    const auto src = config.point(order[i]);
    std::copy(src.begin(), src.end(), out.point(i).begin());
  }
  return out;
}

}  // namespace rq
