#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vecbandit/core_model.hpp"
#include "vecbandit/env_sim.hpp"
#include "vecbandit/optweight.hpp"

namespace vecbandit {

enum class RegretAlgo { CP, CG, CGAdaptive };

std::string to_string(RegretAlgo algo);
RegretAlgo regret_algo_from_string(const std::string& tag);

struct ForcedRounds {
  std::size_t n = 0;
  bool clamped = false;  // the [1, T/(2K)] clamp changed the formula value
};

// Forced-exploration length per arm: CP uses (32 T^2 ln T / K^2)^(1/3), CG uses (K^2 T^2 ln T)^(1/3).
// Throws when T < 2K.
ForcedRounds default_N(RegretAlgo algo, std::size_t T, std::size_t K);

struct Trajectory {
  std::vector<std::size_t> pulls;
  std::vector<double> losses;  // row-major, pulls.size() x dims
  std::size_t dims = 0;
  std::string algo_tag;
  std::uint64_t seed = 0;
  std::size_t forced_pulls = 0;
  // Some empirical mean left [0,1] at a decision point (Gaussian noise only).
  bool means_out_of_range = false;

  std::size_t horizon() const { return pulls.size(); }
  std::span<const double> loss(std::size_t t) const { return {losses.data() + t * dims, dims}; }
  std::vector<std::size_t> pull_counts(std::size_t arms) const;
};

struct CgRoundLog {
  std::size_t t = 0;
  SimplexWeights omega;
  std::size_t x_dim = 0;
  std::vector<double> fed_loss;
};

struct CpSelection {
  CombinatorialArm c_hat;
  SimplexWeights alpha_hat;
  double value = 0.0;
};

// Picks the size-d subset of arms whose best mixture has the smallest worst-dimension loss.
CpSelection cp_select(const Matrix& emp_rel);

// Lowest-index argmin of counts[k] - cum_target[k].
std::size_t tracking_next(std::span<const std::size_t> counts, std::span<const double> cum_target);

// Empirical relative loss minus sqrt(2 ln T / n_k) minus sqrt(2 ln T / N), where n_k is the
// arm's total pull count.
Matrix lcb_matrix(const RunStats& stats, double horizon, double N);

// Lowest-index dimension maximizing the row of lcb * omega.
std::size_t cg_best_response(const Matrix& lcb, std::span<const double> omega);

struct CpOptions {
  // Sample phase-2 arms from alpha_hat instead of tracking it.
  bool randomized = false;
  std::uint64_t sampling_seed = 0;
};

Trajectory cp_run(Environment& env, std::size_t T, std::size_t N, const CpOptions& opts = {});

struct CgResult {
  Trajectory trajectory;
  std::vector<CgRoundLog> rounds;
};

CgResult cg_run(Environment& env, std::size_t T, std::size_t N, bool record_rounds = false);

Trajectory cg_adaptive_run(Environment& env, std::size_t T);

// max_i sum_t rel(i, A_t) - psi_star * T, with the true relative losses.
double regret_of(const Trajectory& traj, const BanditModel& model, double psi_star);
double regret_of(const Trajectory& traj, const BanditModel& model);

}  // namespace vecbandit
