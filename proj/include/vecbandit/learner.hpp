#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vecbandit/core_model.hpp"

namespace vecbandit {

// Exponential weights with the AdaHedge learning rate eta = ln(n) / (sum of mixability gaps).
// While the gap sum is zero the rate is infinite and the mass sits uniformly on the
// minimizers of the cumulative loss.
class HedgeState {
 public:
  explicit HedgeState(std::size_t n);

  SimplexWeights weights() const;
  // Feeds one loss vector; returns the mixability gap of this round.
  double update(std::span<const double> loss);

  std::size_t size() const { return cum_loss_.size(); }
  std::span<const double> cum_loss() const { return cum_loss_; }
  double mix_gap_sum() const { return gap_sum_; }
  std::size_t rounds() const { return rounds_; }
  // Current learning rate; +infinity while the gap sum is zero.
  double eta() const;

 private:
  std::vector<double> raw_weights() const;

  std::vector<double> cum_loss_;
  double gap_sum_ = 0.0;
  std::size_t rounds_ = 0;
};

}  // namespace vecbandit
