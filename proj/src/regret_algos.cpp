#include "vecbandit/regret_algos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "vecbandit/learner.hpp"

namespace vecbandit {

std::string to_string(RegretAlgo algo) {
  switch (algo) {
    case RegretAlgo::CP:
      return "cp";
    case RegretAlgo::CG:
      return "cg";
    case RegretAlgo::CGAdaptive:
      return "cg-adaptive";
  }
  return "unknown";
}

RegretAlgo regret_algo_from_string(const std::string& tag) {
  if (tag == "cp") return RegretAlgo::CP;
  if (tag == "cg") return RegretAlgo::CG;
  if (tag == "cg-adaptive") return RegretAlgo::CGAdaptive;
  throw std::invalid_argument("unknown regret algorithm '" + tag + "'");
}

ForcedRounds default_N(RegretAlgo algo, std::size_t T, std::size_t K) {
  if (K == 0) throw std::invalid_argument("need at least one arm");
  if (T < 2 * K) throw std::invalid_argument("horizon must be at least twice the number of arms");
  const double t = static_cast<double>(T);
  const double k = static_cast<double>(K);
  const double raw = algo == RegretAlgo::CP ? std::cbrt(32.0 * t * t * std::log(t) / (k * k))
                                            : std::cbrt(k * k * t * t * std::log(t));
  const double formula = std::floor(raw);
  const double hi = std::floor(t / (2.0 * k));
  ForcedRounds out;
  const double n = std::clamp(formula, 1.0, hi);
  out.n = static_cast<std::size_t>(n);
  out.clamped = n != formula;
  return out;
}

std::vector<std::size_t> Trajectory::pull_counts(std::size_t arms) const {
  std::vector<std::size_t> counts(arms, 0);
  for (std::size_t a : pulls) ++counts.at(a);
  return counts;
}

namespace {

void pull_and_record(Environment& env, RunStats& stats, Trajectory& traj, std::size_t arm, std::vector<double>& buf) {
  env.pull_into(arm, buf);
  stats.record(arm, buf);
  traj.pulls.push_back(arm);
  traj.losses.insert(traj.losses.end(), buf.begin(), buf.end());
}

bool means_outside_unit(const RunStats& stats) {
  for (std::size_t i = 0; i < stats.dims(); ++i)
    for (std::size_t k = 0; k < stats.arms(); ++k) {
      if (stats.count(k) == 0) continue;
      const double m = stats.mean(i, k);
      if (m < 0.0 || m > 1.0) return true;
    }
  return false;
}

// Writes the LCB matrix into out, using ln(horizon) and the given second width count.
void fill_lcb(const RunStats& stats, double log_h, double N, Matrix& out) {
  const std::size_t d = stats.dims();
  const std::size_t K = stats.arms();
  const double second = std::sqrt(2.0 * log_h / N);
  for (std::size_t i = 0; i < d; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) lo = std::min(lo, stats.mean(i, k));
    for (std::size_t k = 0; k < K; ++k) {
      const double first = std::sqrt(2.0 * log_h / static_cast<double>(stats.count(k)));
      out(i, k) = stats.mean(i, k) - lo - first - second;
    }
  }
}

Trajectory start_trajectory(const Environment& env, RegretAlgo algo, std::size_t T) {
  Trajectory traj;
  traj.dims = env.dims();
  traj.algo_tag = to_string(algo);
  traj.seed = env.seed();
  traj.pulls.reserve(T);
  traj.losses.reserve(T * env.dims());
  return traj;
}

void check_forced(const Environment& env, std::size_t T, std::size_t N) {
  if (N == 0) throw std::invalid_argument("forced exploration length must be positive");
  if (env.arms() * N > T) throw std::invalid_argument("forced exploration exceeds the horizon");
}

}  // namespace

CpSelection cp_select(const Matrix& emp_rel) {
  const std::size_t d = emp_rel.rows();
  const std::size_t K = emp_rel.cols();
  if (K < d) throw std::invalid_argument("cp_select needs at least as many arms as dimensions");
  std::optional<CpSelection> best;
  for_each_subset(K, d, [&](const std::vector<std::size_t>& cols) {
    InnerSolution inner = inner_minmax(emp_rel.select_columns(cols));
    if (!best || inner.value < best->value - 1e-12) best = CpSelection{{cols}, inner.alpha, inner.value};
  });
  return *best;
}

std::size_t tracking_next(std::span<const std::size_t> counts, std::span<const double> cum_target) {
  if (counts.size() != cum_target.size() || counts.empty())
    throw std::invalid_argument("tracking inputs have mismatched lengths");
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double gap = static_cast<double>(counts[k]) - cum_target[k];
    if (gap < best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

Matrix lcb_matrix(const RunStats& stats, double horizon, double N) {
  if (!stats.all_pulled()) throw std::logic_error("LCB needs every arm pulled");
  if (N < 1.0) throw std::invalid_argument("forced round count must be at least 1");
  Matrix out(stats.dims(), stats.arms());
  fill_lcb(stats, std::log(horizon), N, out);
  return out;
}

std::size_t cg_best_response(const Matrix& lcb, std::span<const double> omega) {
  if (omega.size() != lcb.cols()) throw std::invalid_argument("weight length does not match arms");
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lcb.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < lcb.cols(); ++k) s += lcb(i, k) * omega[k];
    if (s > best_val) {
      best_val = s;
      best = i;
    }
  }
  return best;
}

Trajectory cp_run(Environment& env, std::size_t T, std::size_t N, const CpOptions& opts) {
  check_forced(env, T, N);
  const std::size_t K = env.arms();
  const std::size_t d = env.dims();
  if (K < d) throw std::invalid_argument("CP needs at least as many arms as dimensions");

  Trajectory traj = start_trajectory(env, RegretAlgo::CP, T);
  RunStats stats(d, K);
  std::vector<double> buf(d);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t k = 0; k < K; ++k) pull_and_record(env, stats, traj, k, buf);
  traj.forced_pulls = K * N;
  if (traj.horizon() == T) return traj;

  traj.means_out_of_range = means_outside_unit(stats);
  const RelativeLossMatrix emp = relative_losses(stats.means());
  const CpSelection sel = cp_select(emp.values);
  std::vector<double> target(K, 0.0);
  for (std::size_t c = 0; c < sel.c_hat.arms.size(); ++c) target[sel.c_hat.arms[c]] = sel.alpha_hat[c];

  std::vector<std::size_t> counts(K, 0);
  std::vector<double> cum(K, 0.0);
  std::mt19937_64 sampler(opts.sampling_seed);
  std::discrete_distribution<std::size_t> pick(target.begin(), target.end());
  for (std::size_t s = 1; traj.horizon() < T; ++s) {
    std::size_t arm;
    if (opts.randomized) {
      arm = pick(sampler);
    } else {
      for (std::size_t k = 0; k < K; ++k) cum[k] = target[k] * static_cast<double>(s);
      arm = tracking_next(counts, cum);
    }
    ++counts[arm];
    pull_and_record(env, stats, traj, arm, buf);
  }
  return traj;
}

CgResult cg_run(Environment& env, std::size_t T, std::size_t N, bool record_rounds) {
  check_forced(env, T, N);
  const std::size_t K = env.arms();
  const std::size_t d = env.dims();

  CgResult out{start_trajectory(env, RegretAlgo::CG, T), {}};
  Trajectory& traj = out.trajectory;
  RunStats stats(d, K);
  std::vector<double> buf(d);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t k = 0; k < K; ++k) pull_and_record(env, stats, traj, k, buf);
  traj.forced_pulls = K * N;
  traj.means_out_of_range = means_outside_unit(stats);

  HedgeState learner(K);
  std::vector<std::size_t> counts(K, 0);
  std::vector<double> cum(K, 0.0);
  Matrix lcb(d, K);
  const double log_h = std::log(static_cast<double>(T));
  for (std::size_t t = 1; traj.horizon() < T; ++t) {
    const SimplexWeights omega = learner.weights();
    for (std::size_t k = 0; k < K; ++k) cum[k] += omega[k];
    const std::size_t arm = tracking_next(counts, cum);
    ++counts[arm];
    pull_and_record(env, stats, traj, arm, buf);

    fill_lcb(stats, log_h, static_cast<double>(N), lcb);
    const std::size_t dim = cg_best_response(lcb, omega.values());
    const auto fed = lcb.row(dim);
    learner.update(fed);
    if (record_rounds) out.rounds.push_back({t, omega, dim, std::vector<double>(fed.begin(), fed.end())});
  }
  traj.means_out_of_range = traj.means_out_of_range || means_outside_unit(stats);
  return out;
}

Trajectory cg_adaptive_run(Environment& env, std::size_t T) {
  const std::size_t K = env.arms();
  const std::size_t d = env.dims();
  if (T < K) throw std::invalid_argument("horizon shorter than the number of arms");

  Trajectory traj = start_trajectory(env, RegretAlgo::CGAdaptive, T);
  RunStats stats(d, K);
  std::vector<double> buf(d);
  HedgeState learner(K);
  std::vector<std::size_t> counts(K, 0);
  std::vector<double> cum(K, 0.0);
  Matrix lcb(d, K);
  const double kd = static_cast<double>(K);
  while (traj.horizon() < T) {
    const double t = static_cast<double>(traj.horizon() + 1);
    const auto need = static_cast<std::size_t>(std::ceil(std::pow(t, 2.0 / 3.0) / kd));
    const auto all_counts = stats.counts();
    const auto least = static_cast<std::size_t>(std::min_element(all_counts.begin(), all_counts.end()) - all_counts.begin());
    if (all_counts[least] < need) {
      pull_and_record(env, stats, traj, least, buf);
      ++traj.forced_pulls;
      continue;
    }
    const SimplexWeights omega = learner.weights();
    for (std::size_t k = 0; k < K; ++k) cum[k] += omega[k];
    const std::size_t arm = tracking_next(counts, cum);
    ++counts[arm];
    pull_and_record(env, stats, traj, arm, buf);

    fill_lcb(stats, std::log(t), static_cast<double>(stats.min_count()), lcb);
    learner.update(lcb.row(cg_best_response(lcb, omega.values())));
  }
  traj.means_out_of_range = means_outside_unit(stats);
  return traj;
}

double regret_of(const Trajectory& traj, const BanditModel& model, double psi_star) {
  const RelativeLossMatrix rel = relative_losses(model);
  const std::vector<std::size_t> counts = traj.pull_counts(model.arms());
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rel.dims(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < rel.arms(); ++k) s += rel.values(i, k) * static_cast<double>(counts[k]);
    worst = std::max(worst, s);
  }
  return worst - psi_star * static_cast<double>(traj.horizon());
}

double regret_of(const Trajectory& traj, const BanditModel& model) {
  return regret_of(traj, model, solve_minmax_simplex(relative_losses(model)).value);
}

}  // namespace vecbandit
