#include "vecbandit/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vecbandit {

HedgeState::HedgeState(std::size_t n) : cum_loss_(n, 0.0) {
  if (n == 0) throw std::invalid_argument("learner needs at least one action");
}

double HedgeState::eta() const {
  if (gap_sum_ <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(size())) / gap_sum_;
}

std::vector<double> HedgeState::raw_weights() const {
  const std::size_t n = size();
  std::vector<double> w(n, 0.0);
  const double lo = *std::min_element(cum_loss_.begin(), cum_loss_.end());
  const double rate = eta();
  if (std::isinf(rate)) {
    double count = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (cum_loss_[k] == lo) count += 1.0;
    for (std::size_t k = 0; k < n; ++k) w[k] = cum_loss_[k] == lo ? 1.0 / count : 0.0;
    return w;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = std::exp(-rate * (cum_loss_[k] - lo));
    total += w[k];
  }
  for (double& v : w) v /= total;
  return w;
}

SimplexWeights HedgeState::weights() const { return SimplexWeights(raw_weights()); }

double HedgeState::update(std::span<const double> loss) {
  if (loss.size() != size()) throw std::invalid_argument("loss vector has wrong length");
  for (double v : loss)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite loss entry");

  const std::vector<double> w = raw_weights();
  const double rate = eta();
  double expected = 0.0;
  for (std::size_t k = 0; k < size(); ++k) expected += w[k] * loss[k];

  double mix;
  if (std::isinf(rate)) {
    mix = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < size(); ++k)
      if (w[k] > 0.0) mix = std::min(mix, loss[k]);
  } else {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < size(); ++k)
      if (w[k] > 0.0) lo = std::min(lo, loss[k]);
    double s = 0.0;
    for (std::size_t k = 0; k < size(); ++k)
      if (w[k] > 0.0) s += w[k] * std::exp(-rate * (loss[k] - lo));
    mix = lo - std::log(s) / rate;
  }

  const double gap = expected - mix;
  gap_sum_ += std::max(gap, 0.0);
  for (std::size_t k = 0; k < size(); ++k) cum_loss_[k] += loss[k];
  ++rounds_;
  return gap;
}

}  // namespace vecbandit
