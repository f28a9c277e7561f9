#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rq/measures.hpp"
#include "rq/particles.hpp"
#include "test_util.hpp"

using namespace rq;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("uniform ball log density") {
  const auto t = TargetMeasure::uniform_ball(3, 1.0);
  CHECK(log_density_unnorm(t, std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK(log_density_unnorm(t, std::vector<double>{1.5, 0.0, 0.0}) == -kInf);
  CHECK(log_density_unnorm(t, std::vector<double>{0.6, 0.0, 0.8}) == 0.0);  // |x| = 1 boundary
}

TEST_CASE("truncated gaussian log density") {
  const auto t = TargetMeasure::truncated_gaussian({0.0, 0.0}, 0.25, 1.0);
  const std::vector<double> x = {0.3, -0.4};
  CHECK(log_density_unnorm(t, x) == doctest::Approx(-0.25 / (2.0 * 0.25)).epsilon(1e-14));
  CHECK(log_density_unnorm(t, std::vector<double>{1.2, 0.0}) == -kInf);
  CHECK(t.radius == doctest::Approx(1.0));
}

TEST_CASE("tempered density scales the exponent and keeps the support") {
  const auto t = TargetMeasure::truncated_gaussian({0.0}, 1.0, 2.0);
  const std::vector<double> x = {1.0};
  CHECK(log_density_unnorm(t, x, 0.3) == doctest::Approx(0.3 * log_density_unnorm(t, x)));
  CHECK(log_density_unnorm(t, std::vector<double>{3.0}, 0.3) == -kInf);
}

TEST_CASE("mixture on circle matches its construction") {
  const auto t = mixture_on_circle(6, 0.5, 0.1);
  CHECK(t.dim == 2);
  CHECK(t.components.size() == 6);
  CHECK(t.radius == doctest::Approx(1.5));
  for (const auto& comp : t.components) {
    CHECK(comp.weight == doctest::Approx(1.0 / 6.0));
    CHECK(comp.variance == doctest::Approx(0.1));
    CHECK(comp.trunc_radius == doctest::Approx(0.5));
    CHECK(std::hypot(comp.center[0], comp.center[1]) == doctest::Approx(1.0));
  }
  // the origin is outside every component's truncation ball
  CHECK(log_density_unnorm(t, std::vector<double>{0.0, 0.0}) == -kInf);

  const auto single = mixture_on_circle(1, 0.5, 0.1);
  CHECK(single.components.size() == 1);
  CHECK(single.components.front().center[0] == doctest::Approx(1.0));
  CHECK(single.components.front().center[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exact sampling moments: uniform ball") {
  const auto t = TargetMeasure::uniform_ball(2, 1.0);
  rng::Stream rng(123);
  const int draws = 100000;
  double sum_r2 = 0.0;
  std::vector<double> rd(draws);
  for (int i = 0; i < draws; ++i) {
    const auto x = exact_sample(t, rng);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    CHECK(r2 <= 1.0 + 1e-12);
    sum_r2 += r2;
    rd[i] = r2;  // |x|^d = r^2 in d = 2 should be uniform on [0,1]
  }
  // E|x|^2 = d/(d+2) = 1/2, Var|x|^2 = 1/12
  const double mean = sum_r2 / draws;
  const double se = std::sqrt(1.0 / 12.0 / draws);
  CHECK(std::abs(mean - 0.5) < 3.0 * se);
  CHECK(rqtest::ks_distance_uniform(rd, 1.0) < 0.01);
}

TEST_CASE("exact sampling moments: truncated gaussian with wide truncation") {
  const double sigma2 = 0.04;
  const auto t = TargetMeasure::truncated_gaussian({0.7, -0.3, 0.1}, sigma2,
                                                   10.0 * std::sqrt(sigma2));
  rng::Stream rng(321);
  const int draws = 100000;
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < draws; ++i) {
    const auto x = exact_sample(t, rng);
    for (int k = 0; k < 3; ++k) mean[k] += x[k];
  }
  const double se = std::sqrt(sigma2 / draws);
  const std::vector<double> center = {0.7, -0.3, 0.1};
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mean[k] / draws - center[k]) < 3.0 * se);
}

TEST_CASE("exact samples stay inside the support for every family") {
  rng::Stream rng(55);
  const std::vector<TargetMeasure> targets = {
      TargetMeasure::uniform_ball(3, 2.0),
      TargetMeasure::truncated_gaussian({0.5, 0.5}, 0.1, 0.7),
      mixture_on_circle(6, 0.5, 0.1),
  };
  for (const auto& t : targets) {
    for (int i = 0; i < 100000; ++i) {
      const auto x = exact_sample(t, rng);
      double norm2 = 0.0;
      for (double c : x) norm2 += c * c;
      CHECK(norm2 <= t.radius * t.radius + 1e-12);
      CHECK(log_density_unnorm(t, x) > -kInf);
    }
  }
}

TEST_CASE("random-walk MH chain basics") {
  const auto t = TargetMeasure::uniform_ball(2, 1.0);
  auto logd = [&t](std::span<const double> x) { return log_density_unnorm(t, x); };

  rng::Stream rng(77);
  const std::vector<double> x0 = {0.25, -0.5};
  std::vector<double> states(10 * 2);

  // zero proposal: every state equals the start
  rw_mh_chain(logd, x0, 10, false, 0.0, rng, states.data(), 2);
  for (int i = 0; i < 10; ++i) {
    CHECK(states[2 * i] == x0[0]);
    CHECK(states[2 * i + 1] == x0[1]);
  }

  // include_init stores x0 first
  rw_mh_chain(logd, x0, 10, true, 0.1, rng, states.data(), 2);
  CHECK(states[0] == x0[0]);
  CHECK(states[1] == x0[1]);
}

TEST_CASE("mixture weights must sum to one") {
  GaussianComponent a{{0.0, 0.0}, 1.0, 1.0, 0.7};
  GaussianComponent b{{1.0, 0.0}, 1.0, 1.0, 0.7};
  CHECK_THROWS_AS(TargetMeasure::gaussian_mixture({a, b}), std::invalid_argument);
}
