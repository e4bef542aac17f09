#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vecbandit/core_model.hpp"

namespace vecbandit {

// SplitMix64 finalizer; used to derive independent per-replication streams.
std::uint64_t splitmix64(std::uint64_t x);

// seed XOR splitmix64(replication).
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication);

// Stochastic environment. Observations are drawn from a mt19937_64 stream seeded
// with `seed`, so the same seed and the same pull sequence give identical samples.
// Gaussian observations are not clipped.
class Environment {
 public:
  Environment(BanditModel model, std::uint64_t seed);

  std::vector<double> pull(std::size_t arm);
  void pull_into(std::size_t arm, std::span<double> out);

  const BanditModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t draw_count() const { return draw_count_; }
  std::size_t arms() const { return model_.arms(); }
  std::size_t dims() const { return model_.dims(); }

 private:
  BanditModel model_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::uint64_t draw_count_ = 0;
};

// Sufficient statistics of a run: pull counts and per-(dimension, arm) sums.
class RunStats {
 public:
  RunStats(std::size_t dims, std::size_t arms);

  void record(std::size_t arm, std::span<const double> obs);

  std::size_t dims() const { return sums_.rows(); }
  std::size_t arms() const { return sums_.cols(); }
  std::size_t total() const { return total_; }
  std::size_t count(std::size_t k) const { return counts_[k]; }
  std::span<const std::size_t> counts() const { return counts_; }
  std::size_t min_count() const;
  bool all_pulled() const { return min_count() > 0; }

  const Matrix& sums() const { return sums_; }
  // Throws if arm k has not been pulled.
  double mean(std::size_t i, std::size_t k) const;
  // Throws if any arm has not been pulled.
  Matrix means() const;

 private:
  std::vector<std::size_t> counts_;
  Matrix sums_;
  std::size_t total_ = 0;
};

// sqrt(2 ln(t) / n)
double conf_radius(double t, double n);

// Event E_{1,t}: every empirical mean within conf_radius(t, N_k) of the truth.
bool good_event_holds(const RunStats& stats, const BanditModel& model, double t);

}  // namespace vecbandit
