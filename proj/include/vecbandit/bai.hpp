#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vecbandit/core_model.hpp"
#include "vecbandit/env_sim.hpp"

namespace vecbandit {

enum class BaiSampler { DTracking, Game };

std::string to_string(BaiSampler sampler);
BaiSampler bai_sampler_from_string(const std::string& tag);

struct BaiConfig {
  double delta = 0.1;
  BaiSampler sampler = BaiSampler::DTracking;
  std::size_t max_rounds = 1000000;
  // Oracle weights are re-solved every round while t <= 10K, then whenever
  // t - last >= max(cadence, cadence_growth * t).
  std::size_t cadence = 10;
  double cadence_growth = 0.0;
  // Subgradient iterations for the first oracle solve, then for warm-started re-solves.
  std::size_t oracle_iterations = 2000;
  std::size_t oracle_warm_iterations = 100;
  double oracle_warm_step = 0.05;
  // Forced rounds per arm for the game sampler; 0 means ceil(sqrt(max_rounds)).
  std::size_t forced_rounds = 0;
  bool record_trace = false;
};

struct BaiTracePoint {
  std::size_t t = 0;
  double glr = 0.0;
  double beta = 0.0;
};

struct BaiOutcome {
  std::size_t tau = 0;
  std::size_t answer = 0;
  bool correct = false;
  bool truncated = false;
  std::vector<std::size_t> pulls;
  double final_glr = 0.0;
  std::vector<BaiTracePoint> trace;
};

// Lowest-index arm minimizing its worst-dimension relative loss.
std::size_t best_answer(const Matrix& means);
// True when a second arm ties the best worst-dimension relative loss within tol.
bool best_answer_unique(const Matrix& means, double tol = 1e-12);

// ln((1 + ln t) / delta)
double threshold_beta(double t, double delta);

// Means pushed into the family's domain: [0,1] for Gaussian, [1e-6, 1 - 1e-6] for Bernoulli.
Matrix clamp_means(const Matrix& means, Family family);

// One piece of the alternative set: arm k_star overtakes the answer, whose relative
// loss is worst in dimension `dim`, where arm `attainer` sets that dimension's minimum.
struct AltCase {
  std::size_t k_star = 0;
  std::size_t dim = 0;
  std::size_t attainer = 0;
  double x = 0.0;  // the answer's relative loss level in `dim`
};

struct AltSolution {
  double value = 0.0;
  Matrix lambda;
  std::optional<AltCase> piece;  // empty for the trivial cases
};

// inf over lambda with best_answer(lambda) != answer of sum_k w_k sum_i d(means(i,k), lambda(i,k)).
// The returned lambda lies strictly inside the alternative set; value is the infimum.
// Supports d <= 3 and K <= 8.
AltSolution alt_inf(std::span<const double> weights, const Matrix& means, Family family, std::size_t answer);

// Cost of the best lambda inside one piece with the level fixed at piece.x; an upper
// bound on alt_inf. Infinite when the piece does not fit the answer.
double alt_piece_cost(std::span<const double> weights, const Matrix& means, Family family, std::size_t answer,
                      const AltCase& piece);

// Generalized likelihood ratio of the empirical model against its alternative set.
double glr(const RunStats& stats, Family family);

struct OracleOptions {
  std::size_t iterations = 2000;
  double step = 0.5;
  std::vector<double> start;  // empty means uniform
};

struct OracleResult {
  SimplexWeights omega;
  double value = 0.0;
  double t_star = 0.0;
};

// max over the simplex of alt_inf(omega, means) by projected subgradient ascent.
// Throws when the best answer is not unique.
OracleResult oracle_weights(const Matrix& means, Family family, const OracleOptions& opts = {});

// Forced pull of the least-pulled arm when min count < sqrt(t) - K/2, else argmax omega_k - N_k / t.
std::size_t dtracking_next(const RunStats& stats, std::span<const double> omega_hat);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;
};

// {xi in [0,1] : N_k sum_i d(mean(i,k), xi) <= f_t}
Interval confidence_interval_arm(const RunStats& stats, std::size_t k, double f_t, Family family);

// Per-arm optimistic gain: max(f_t / N_k, max over interval endpoints xi of sum_i d(xi, lambda(i,k))).
std::vector<double> optimistic_gain(const RunStats& stats, const Matrix& lambda, double f_t, Family family);

BaiOutcome track_and_stop_run(Environment& env, const BaiConfig& cfg);
BaiOutcome gamified_bai_run(Environment& env, const BaiConfig& cfg);
BaiOutcome bai_run(Environment& env, const BaiConfig& cfg);

// Project onto the probability simplex in Euclidean norm.
std::vector<double> project_simplex(std::span<const double> v);

}  // namespace vecbandit
