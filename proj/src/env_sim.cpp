#include "vecbandit/env_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vecbandit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication) {
  return base_seed ^ splitmix64(replication);
}

Environment::Environment(BanditModel model, std::uint64_t seed)
    : model_(std::move(model)), seed_(seed), rng_(seed) {}

std::vector<double> Environment::pull(std::size_t arm) {
  std::vector<double> out(dims());
  pull_into(arm, out);
  return out;
}

void Environment::pull_into(std::size_t arm, std::span<double> out) {
  if (arm >= arms()) throw std::out_of_range("arm index out of range");
  if (out.size() != dims()) throw std::invalid_argument("observation buffer has wrong length");
  for (std::size_t i = 0; i < dims(); ++i) {
    const double mu = model_.mean(i, arm);
    if (model_.family() == Family::GaussianUnitVariance) {
      out[i] = mu + normal_(rng_);
    } else {
      out[i] = uniform_(rng_) < mu ? 1.0 : 0.0;
    }
  }
  ++draw_count_;
}

RunStats::RunStats(std::size_t dims, std::size_t arms) : counts_(arms, 0), sums_(dims, arms) {}

void RunStats::record(std::size_t arm, std::span<const double> obs) {
  if (arm >= arms()) throw std::out_of_range("arm index out of range");
  if (obs.size() != dims()) throw std::invalid_argument("observation has wrong dimension");
  ++counts_[arm];
  for (std::size_t i = 0; i < dims(); ++i) sums_(i, arm) += obs[i];
  ++total_;
}

std::size_t RunStats::min_count() const { return *std::min_element(counts_.begin(), counts_.end()); }

double RunStats::mean(std::size_t i, std::size_t k) const {
  if (counts_.at(k) == 0) throw std::logic_error("empirical mean of an unpulled arm");
  return sums_(i, k) / static_cast<double>(counts_[k]);
}

Matrix RunStats::means() const {
  Matrix out(dims(), arms());
  for (std::size_t i = 0; i < dims(); ++i)
    for (std::size_t k = 0; k < arms(); ++k) out(i, k) = mean(i, k);
  return out;
}

double conf_radius(double t, double n) { return std::sqrt(2.0 * std::log(t) / n); }

bool good_event_holds(const RunStats& stats, const BanditModel& model, double t) {
  if (stats.dims() != model.dims() || stats.arms() != model.arms())
    throw std::invalid_argument("stats shape does not match the model");
  for (std::size_t k = 0; k < stats.arms(); ++k) {
    if (stats.count(k) == 0) throw std::logic_error("good event needs every arm pulled");
    const double radius = conf_radius(t, static_cast<double>(stats.count(k)));
    for (std::size_t i = 0; i < stats.dims(); ++i)
      if (std::abs(stats.mean(i, k) - model.mean(i, k)) > radius) return false;
  }
  return true;
}

}  // namespace vecbandit
