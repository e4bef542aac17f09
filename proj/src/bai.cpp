#include "vecbandit/bai.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "vecbandit/learner.hpp"

namespace vecbandit {

std::string to_string(BaiSampler sampler) {
  return sampler == BaiSampler::DTracking ? "tas" : "game";
}

BaiSampler bai_sampler_from_string(const std::string& tag) {
  if (tag == "tas") return BaiSampler::DTracking;
  if (tag == "game") return BaiSampler::Game;
  throw std::invalid_argument("unknown BAI algorithm '" + tag + "'");
}

namespace {

std::vector<double> worst_relative_all(const Matrix& means) {
  const RelativeLossMatrix rel = relative_losses(means);
  std::vector<double> worst(means.cols(), 0.0);
  for (std::size_t i = 0; i < rel.dims(); ++i)
    for (std::size_t k = 0; k < rel.arms(); ++k) worst[k] = std::max(worst[k], rel.values(i, k));
  return worst;
}

}  // namespace

std::size_t best_answer(const Matrix& means) {
  const std::vector<double> worst = worst_relative_all(means);
  return static_cast<std::size_t>(std::min_element(worst.begin(), worst.end()) - worst.begin());
}

bool best_answer_unique(const Matrix& means, double tol) {
  const std::vector<double> worst = worst_relative_all(means);
  const std::size_t best = static_cast<std::size_t>(std::min_element(worst.begin(), worst.end()) - worst.begin());
  for (std::size_t k = 0; k < worst.size(); ++k)
    if (k != best && worst[k] <= worst[best] + tol) return false;
  return true;
}

double threshold_beta(double t, double delta) { return std::log((1.0 + std::log(t)) / delta); }

Matrix clamp_means(const Matrix& means, Family family) {
  const double lo = family == Family::Bernoulli ? 1e-6 : 0.0;
  const double hi = family == Family::Bernoulli ? 1.0 - 1e-6 : 1.0;
  Matrix out = means;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t k = 0; k < out.cols(); ++k) out(i, k) = std::clamp(out(i, k), lo, hi);
  return out;
}

namespace {

std::vector<double> count_weights(const RunStats& stats) {
  std::vector<double> w(stats.arms());
  for (std::size_t k = 0; k < stats.arms(); ++k) w[k] = static_cast<double>(stats.count(k));
  return w;
}

// GLR evaluation that first checks the piece that was optimal last time: its cost is an
// upper bound, so when it does not clear the threshold the exact search can be skipped.
class GlrTester {
 public:
  explicit GlrTester(Family family) : family_(family) {}

  // Returns the GLR, or an upper bound on it that is <= threshold.
  double evaluate(const RunStats& stats, double threshold, bool exact) {
    const Matrix means = clamp_means(stats.means(), family_);
    const std::size_t answer = best_answer(means);
    const std::vector<double> w = count_weights(stats);
    if (!exact && last_ && last_answer_ == answer) {
      const double bound = alt_piece_cost(w, means, family_, answer, *last_);
      if (bound <= threshold) return bound;
    }
    const AltSolution sol = alt_inf(w, means, family_, answer);
    last_ = sol.piece;
    last_answer_ = answer;
    return sol.value;
  }

 private:
  Family family_;
  std::optional<AltCase> last_;
  std::size_t last_answer_ = 0;
};

}  // namespace

double glr(const RunStats& stats, Family family) {
  if (!stats.all_pulled()) throw std::logic_error("GLR needs every arm pulled");
  const Matrix means = clamp_means(stats.means(), family);
  return alt_inf(count_weights(stats), means, family, best_answer(means)).value;
}

std::vector<double> project_simplex(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = std::max(v[k] - theta, 0.0);
  const double s = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& x : out) x /= s;
  return out;
}

OracleResult oracle_weights(const Matrix& means, Family family, const OracleOptions& opts) {
  if (!best_answer_unique(means)) throw std::domain_error("oracle weights need a unique best answer");
  const std::size_t K = means.cols();
  const std::size_t answer = best_answer(means);
  std::vector<double> omega = opts.start.size() == K ? project_simplex(opts.start)
                                                     : std::vector<double>(K, 1.0 / static_cast<double>(K));
  std::vector<double> best_omega = omega;
  double best = -1.0;
  const std::size_t iters = std::max<std::size_t>(opts.iterations, 1);
  for (std::size_t it = 1; it <= iters; ++it) {
    const AltSolution sol = alt_inf(omega, means, family, answer);
    if (sol.value > best) {
      best = sol.value;
      best_omega = omega;
    }
    if (it == iters) break;
    std::vector<double> g(K, 0.0);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < means.rows(); ++i) g[k] += divergence(family, means(i, k), sol.lambda(i, k));
    // Only the component orthogonal to the all-ones direction moves the point on the simplex.
    const double mean_g = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(K);
    double norm = 0.0;
    for (double& x : g) {
      x -= mean_g;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm <= 0.0) break;
    const double step = opts.step / std::sqrt(static_cast<double>(it));
    for (std::size_t k = 0; k < K; ++k) omega[k] += step * g[k] / norm;
    omega = project_simplex(omega);
  }
  OracleResult out{SimplexWeights(best_omega), best, best > 0.0 ? 1.0 / best : std::numeric_limits<double>::infinity()};
  return out;
}

std::size_t dtracking_next(const RunStats& stats, std::span<const double> omega_hat) {
  const std::size_t K = stats.arms();
  if (omega_hat.size() != K) throw std::invalid_argument("weight length does not match arms");
  const double t = static_cast<double>(stats.total());
  const auto counts = stats.counts();
  const auto least = static_cast<std::size_t>(std::min_element(counts.begin(), counts.end()) - counts.begin());
  if (static_cast<double>(counts[least]) < std::sqrt(t) - static_cast<double>(K) / 2.0) return least;
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    const double v = omega_hat[k] - (t > 0.0 ? static_cast<double>(counts[k]) / t : 0.0);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  return best;
}

Interval confidence_interval_arm(const RunStats& stats, std::size_t k, double f_t, Family family) {
  if (stats.count(k) == 0) throw std::logic_error("confidence interval of an unpulled arm");
  const double n = static_cast<double>(stats.count(k));
  const std::size_t d = stats.dims();
  std::vector<double> centers(d);
  for (std::size_t i = 0; i < d; ++i) centers[i] = stats.mean(i, k);
  if (family == Family::Bernoulli)
    for (double& c : centers) c = std::clamp(c, 1e-6, 1.0 - 1e-6);
  const double center = std::accumulate(centers.begin(), centers.end(), 0.0) / static_cast<double>(d);
  auto h = [&](double xi) {
    double s = 0.0;
    for (double c : centers) s += divergence(family, c, xi);
    return n * s;
  };

  Interval out;
  if (family == Family::GaussianUnitVariance) {
    double spread = 0.0;
    for (double c : centers) spread += (c - center) * (c - center);
    // n/2 * (d (xi - center)^2 + spread) <= f_t
    const double rhs = (2.0 * f_t / n - spread) / static_cast<double>(d);
    if (rhs < 0.0) return out;
    const double half = std::sqrt(rhs);
    out.lo = center - half;
    out.hi = center + half;
  } else {
    if (h(center) > f_t) return out;
    auto edge = [&](double inside, double outside) {
      if (h(outside) <= f_t) return outside;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (inside + outside);
        (h(mid) <= f_t ? inside : outside) = mid;
      }
      return inside;
    };
    out.lo = edge(center, 1e-12);
    out.hi = edge(center, 1.0 - 1e-12);
  }
  out.lo = std::max(out.lo, 0.0);
  out.hi = std::min(out.hi, 1.0);
  out.empty = out.lo > out.hi;
  return out;
}

std::vector<double> optimistic_gain(const RunStats& stats, const Matrix& lambda, double f_t, Family family) {
  const std::size_t K = stats.arms();
  if (lambda.cols() != K || lambda.rows() != stats.dims()) throw std::invalid_argument("lambda has wrong shape");
  std::vector<double> u(K);
  for (std::size_t k = 0; k < K; ++k) {
    double best = f_t / static_cast<double>(stats.count(k));
    const Interval iv = confidence_interval_arm(stats, k, f_t, family);
    if (!iv.empty) {
      for (double xi : {iv.lo, iv.hi}) {
        double s = 0.0;
        for (std::size_t j = 0; j < stats.dims(); ++j) s += divergence(family, xi, lambda(j, k));
        best = std::max(best, s);
      }
    }
    u[k] = best;
  }
  return u;
}

namespace {

struct StopCheck {
  bool stop = false;
  double glr = 0.0;
};

class BaiLoop {
 public:
  BaiLoop(Environment& env, const BaiConfig& cfg)
      : env_(env), cfg_(cfg), stats_(env.dims(), env.arms()), tester_(env.model().family()), buf_(env.dims()) {
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (env.dims() > 3 || env.arms() > 8) throw std::invalid_argument("BAI supports d <= 3 and K <= 8");
    truth_ = best_answer(env.model().means());
  }

  void pull(std::size_t arm) {
    env_.pull_into(arm, buf_);
    stats_.record(arm, buf_);
  }

  StopCheck check() {
    const double t = static_cast<double>(stats_.total());
    const double beta = threshold_beta(t, cfg_.delta);
    const double g = tester_.evaluate(stats_, beta, cfg_.record_trace);
    if (cfg_.record_trace) trace_.push_back({stats_.total(), g, beta});
    return {g > beta, g};
  }

  Matrix clamped_means() const { return clamp_means(stats_.means(), env_.model().family()); }

  BaiOutcome finish(bool truncated, double last_glr) {
    BaiOutcome out;
    out.tau = stats_.total();
    out.answer = best_answer(clamped_means());
    out.correct = out.answer == truth_;
    out.truncated = truncated;
    out.pulls.assign(stats_.counts().begin(), stats_.counts().end());
    out.final_glr = last_glr;
    out.trace = std::move(trace_);
    return out;
  }

  RunStats& stats() { return stats_; }
  const BaiConfig& cfg() const { return cfg_; }
  Family family() const { return env_.model().family(); }
  std::size_t arms() const { return env_.arms(); }

 private:
  Environment& env_;
  const BaiConfig& cfg_;
  RunStats stats_;
  GlrTester tester_;
  std::vector<double> buf_;
  std::vector<BaiTracePoint> trace_;
  std::size_t truth_ = 0;
};

}  // namespace

BaiOutcome track_and_stop_run(Environment& env, const BaiConfig& cfg) {
  BaiLoop loop(env, cfg);
  const std::size_t K = env.arms();
  for (std::size_t k = 0; k < K; ++k) loop.pull(k);

  std::vector<double> omega(K, 1.0 / static_cast<double>(K));
  std::size_t last_solve = 0;
  while (true) {
    const StopCheck sc = loop.check();
    if (sc.stop) return loop.finish(false, sc.glr);
    const std::size_t t = loop.stats().total();
    if (t >= cfg.max_rounds) return loop.finish(true, sc.glr);

    const double gap = std::max(static_cast<double>(cfg.cadence), cfg.cadence_growth * static_cast<double>(t));
    if (t <= 10 * K || static_cast<double>(t - last_solve) >= gap) {
      const Matrix means = loop.clamped_means();
      if (best_answer_unique(means)) {
        OracleOptions opts;
        opts.iterations = cfg.oracle_iterations;
        if (last_solve > 0) {
          opts.start = omega;
          opts.iterations = cfg.oracle_warm_iterations;
          opts.step = cfg.oracle_warm_step;
        }
        omega = oracle_weights(means, loop.family(), opts).omega.vector();
      } else {
        omega.assign(K, 1.0 / static_cast<double>(K));
      }
      last_solve = t;
    }
    loop.pull(dtracking_next(loop.stats(), omega));
  }
}

BaiOutcome gamified_bai_run(Environment& env, const BaiConfig& cfg) {
  BaiLoop loop(env, cfg);
  const std::size_t K = env.arms();
  const std::size_t forced =
      cfg.forced_rounds > 0 ? cfg.forced_rounds
                            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.max_rounds))));
  for (std::size_t r = 0; r < forced && loop.stats().total() < cfg.max_rounds; ++r)
    for (std::size_t k = 0; k < K && loop.stats().total() < cfg.max_rounds; ++k) loop.pull(k);

  std::map<std::size_t, HedgeState> learners;
  std::vector<double> cum(K, 0.0);
  while (true) {
    if (!loop.stats().all_pulled()) return loop.finish(true, 0.0);
    const StopCheck sc = loop.check();
    if (sc.stop) return loop.finish(false, sc.glr);
    const std::size_t t = loop.stats().total();
    if (t >= cfg.max_rounds) return loop.finish(true, sc.glr);

    const Matrix means = loop.clamped_means();
    const std::size_t candidate = best_answer(means);
    HedgeState& learner = learners.try_emplace(candidate, K).first->second;
    const SimplexWeights omega = learner.weights();
    for (std::size_t k = 0; k < K; ++k) cum[k] += omega[k];

    const AltSolution response = alt_inf(omega.values(), means, loop.family(), candidate);
    const double f_t = std::log(static_cast<double>(t));
    std::vector<double> gain = optimistic_gain(loop.stats(), response.lambda, f_t, loop.family());
    for (double& g : gain) g = -g;
    learner.update(gain);

    const auto counts = loop.stats().counts();
    std::size_t arm = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      const double v = static_cast<double>(counts[k]) - cum[k];
      if (v < lowest) {
        lowest = v;
        arm = k;
      }
    }
    loop.pull(arm);
  }
}

BaiOutcome bai_run(Environment& env, const BaiConfig& cfg) {
  return cfg.sampler == BaiSampler::DTracking ? track_and_stop_run(env, cfg) : gamified_bai_run(env, cfg);
}

}  // namespace vecbandit
