#include <cmath>
#include <random>

#include "doctest.h"
#include "vecbandit/learner.hpp"

using namespace vecbandit;

namespace {

double bound(double T, double range, double n) {
  return 2.0 * std::sqrt(T * range * range * std::log(n)) + (16.0 / 3.0) * range * std::log(n) + 2.0 * range;
}

// Runs the learner on a stream and returns its regret against the best fixed action.
double play(HedgeState& h, const std::vector<std::vector<double>>& stream) {
  double learner = 0.0;
  for (const auto& loss : stream) {
    const SimplexWeights w = h.weights();
    for (std::size_t k = 0; k < loss.size(); ++k) learner += w[k] * loss[k];
    h.update(loss);
  }
  const auto cum = h.cum_loss();
  return learner - *std::min_element(cum.begin(), cum.end());
}

}  // namespace

TEST_CASE("fresh learners are uniform") {
  CHECK(HedgeState(3).weights()[1] == doctest::Approx(1.0 / 3.0));
  CHECK(HedgeState(1).weights()[0] == 1.0);
  CHECK(HedgeState(4).weights().vector() == HedgeState(4).weights().vector());
  CHECK_THROWS_AS(HedgeState(0), std::invalid_argument);
}

TEST_CASE("weights concentrate on the leader when the gap sum is small") {
  HedgeState h(3);
  for (int t = 0; t < 1000; ++t) h.update(std::vector<double>{0.0, 0.01, 0.01});
  CHECK(h.cum_loss()[1] == doctest::Approx(10.0));
  CHECK(h.mix_gap_sum() < 0.1);
  CHECK(h.weights()[0] > 0.99);
}

TEST_CASE("infinite rate splits mass over tied leaders") {
  HedgeState h(3);
  h.update(std::vector<double>{0.0, 0.0, 0.0});
  CHECK(h.mix_gap_sum() == 0.0);
  h.update(std::vector<double>{1.0, 1.0, 1.0});
  CHECK(h.weights()[2] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("equal cumulative losses give uniform weights") {
  HedgeState h(3);
  h.update(std::vector<double>{1, 0, 0});
  h.update(std::vector<double>{0, 1, 0});
  h.update(std::vector<double>{0, 0, 1});
  const SimplexWeights ws = h.weights();
  for (double w : ws.values()) CHECK(w == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("constant losses have zero gap") {
  HedgeState h(4);
  for (int t = 0; t < 10; ++t) CHECK(std::abs(h.update(std::vector<double>(4, 0.7))) <= 1e-12);
  const SimplexWeights ws = h.weights();
  for (double w : ws.values()) CHECK(w == doctest::Approx(0.25));
}

TEST_CASE("single action") {
  HedgeState h(1);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    CHECK(h.update(std::vector<double>{double(rng() % 100) / 10.0}) == 0.0);
    CHECK(h.weights()[0] == 1.0);
  }
}

TEST_CASE("non-finite losses are rejected") {
  HedgeState h(2);
  CHECK_THROWS_AS(h.update(std::vector<double>{0.0, NAN}), std::invalid_argument);
  CHECK_THROWS_AS(h.update(std::vector<double>{INFINITY, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(h.update(std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("repeated (0,1) losses stay within the regret bound") {
  HedgeState h(2);
  const std::vector<std::vector<double>> stream(10000, std::vector<double>{0.0, 1.0});
  CHECK(play(h, stream) <= bound(1e4, 1.0, 2.0));
}

TEST_CASE("property: regret bound, nonnegative gaps and translation invariance") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng() % 7;
    const double a = -1.0 + 2.0 * (rng() % 1000) / 1000.0;
    const double b = a + 0.1 + 2.0 * (rng() % 1000) / 1000.0;
    std::uniform_real_distribution<double> u(a, b);
    std::vector<std::vector<double>> stream(2000, std::vector<double>(n));
    for (auto& l : stream)
      for (double& v : l) v = u(rng);
    HedgeState h(n), shifted(n);
    double learner = 0.0;
    for (const auto& l : stream) {
      const SimplexWeights w = h.weights();
      const SimplexWeights ws = shifted.weights();
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(std::abs(w[k] - ws[k]) <= 1e-9);
        learner += w[k] * l[k];
      }
      CHECK(h.update(l) >= -1e-12);
      std::vector<double> l2 = l;
      for (double& v : l2) v += 3.5;
      shifted.update(l2);
    }
    const auto cum = h.cum_loss();
    CHECK(learner - *std::min_element(cum.begin(), cum.end()) <= bound(2000, b - a, double(n)));
  }
}
