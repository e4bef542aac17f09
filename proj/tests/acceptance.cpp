#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vecbandit/bai.hpp"
#include "vecbandit/harness.hpp"
#include "vecbandit/learner.hpp"
#include "vecbandit/optweight.hpp"
#include "vecbandit/regret_algos.hpp"

using namespace vecbandit;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix random_means(std::mt19937_64& rng, std::size_t d, std::size_t K) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(d, K);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < K; ++k) m(i, k) = u(rng);
  return m;
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Verdict optimal_weights() {
  std::mt19937_64 rng(1001);
  const double step = 1.0 / 200.0;
  int ok = 0, support_ok = 0;
  double solver_s = 0.0, worst_below = 0.0, worst_above = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = 1 + rng() % 3, K = 1 + rng() % 5;
    const RelativeLossMatrix rel = relative_losses(random_means(rng, d, K));
    const auto start = std::chrono::steady_clock::now();
    const OptWeightResult res = solve_minmax_simplex(rel);
    solver_s += seconds_since(start);
    const double grid = grid_oracle(rel, step).value;
    const double above = grid - res.value;
    worst_below = std::max(worst_below, res.value - grid);
    worst_above = std::max(worst_above, above);
    if (res.value <= grid + 1e-9 && above <= static_cast<double>(d * K) * step) ++ok;
    if (res.support.size() <= d) ++support_ok;
  }
  return {ok == 200 && support_ok == 200 && solver_s < 5.0,
          fmt("value ok %d/200, support<=d %d/200, max solver-above-grid %.3g, max grid gap %.3g, solver time %.3fs",
              ok, support_ok, worst_below, worst_above, solver_s)};
}

Verdict closed_form() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int seen[5] = {0, 0, 0, 0, 0};
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::vector<double> a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const PairSolution p = pair_loss_d2(a, b);
    const InnerSolution q = inner_minmax(Matrix::from_rows({{a[0], b[0]}, {a[1], b[1]}}));
    worst = std::max(worst, std::abs(p.value - q.value));
    ++seen[p.case_id];
  }
  const bool cases = seen[1] >= 50 && seen[2] >= 50 && seen[3] >= 50 && seen[4] >= 50;
  return {worst <= 1e-9 && cases,
          fmt("max |diff| %.3g, case counts %d/%d/%d/%d", worst, seen[1], seen[2], seen[3], seen[4])};
}

Verdict reference_examples() {
  bool pass = true;
  std::string detail;
  const BanditModel t1 = gen_table1();
  const OptWeightResult r1 = solve_minmax_simplex(relative_losses(t1.means()));
  const std::size_t ans = best_answer(t1.means());
  pass = pass && ans == 2 && std::abs(r1.value - 0.5) <= 1e-9;
  detail += fmt("three-arm: answer arm %zu, value %.12g; ", ans + 1, r1.value);

  const OptWeightResult r2 = solve_minmax_simplex(relative_losses(Matrix::from_rows({{1, 0, 0.75}, {0, 1, 0.75}})));
  pass = pass && std::abs(r2.value - 0.5) <= 1e-9 && r2.support.size() == 2;
  detail += fmt("mixture: value %.12g support %zu; ", r2.value, r2.support.size());

  for (double eps : {0.05, 0.1, 0.2, 0.5}) {
    const OptWeightResult r = solve_minmax_simplex(relative_losses(gen_lb_alt_instance(eps).means()));
    const double target = (1 + eps) / 8;
    const bool ok = std::abs(r.value - target) <= 1e-9 && std::abs(r.weights[2] - 1.0) <= 1e-9;
    pass = pass && ok;
    detail += fmt("perturbed eps=%.2f: value %.12g w3 %.12g%s", eps, r.value, r.weights[2], eps == 0.5 ? "" : "; ");
  }
  return {pass, detail};
}

Verdict scaling() {
  ExperimentConfig cfg;
  cfg.model = gen_lb_instance(0.1);
  for (int e = 10; e <= 17; ++e) cfg.horizons.push_back(std::size_t(1) << e);
  cfg.reps = 50;
  cfg.seed = 1004;
  cfg.record_timing = false;
  bool pass = true;
  std::string detail;
  for (const char* algo : {"cp", "cg"}) {
    cfg.algo = algo;
    const auto curve = mean_regret_by_horizon(run_experiment(cfg).regret);
    const SlopeFit fit = fit_slope(curve);
    const bool slope_ok = fit.slope >= 0.55 && fit.slope <= 0.80;
    pass = pass && slope_ok;
    detail += fmt("%s slope %.3f (r2 %.3f); ", algo, fit.slope, fit.r2);
    if (std::string(algo) == "cg") {
      bool env_ok = true;
      for (const auto& [T, mean] : curve) {
        const double N = static_cast<double>(default_N(RegretAlgo::CG, std::size_t(T), 4).n);
        env_ok = env_ok && mean < 12.0 * std::sqrt(2.0 * std::log(T) / N) * T;
      }
      pass = pass && env_ok;
      detail += fmt("cg envelope %s; ", env_ok ? "held" : "violated");
    }
    for (const auto& [T, mean] : curve) detail += fmt("%s T=%g:%.1f ", algo, T, mean);
    detail += "; ";
  }
  return {pass, detail};
}

Verdict vanishing() {
  ExperimentConfig cfg;
  cfg.model = gen_table1(Family::Bernoulli);
  cfg.horizons = {std::size_t(1) << 15};
  cfg.reps = 20;
  cfg.seed = 1005;
  cfg.record_timing = false;
  bool pass = true;
  std::string detail;
  for (const char* algo : {"cp", "cg"}) {
    cfg.algo = algo;
    const auto curve = mean_regret_by_horizon(run_experiment(cfg).regret);
    const double ratio = curve[0].second / curve[0].first;
    pass = pass && ratio <= 0.1;
    detail += fmt("%s regret/T %.4f; ", algo, ratio);
  }
  return {pass, detail};
}

Verdict concentration() {
  const BanditModel model = gen_table1(Family::GaussianUnitVariance);
  const std::size_t d = model.dims(), K = model.arms();
  bool pass = true;
  std::string detail;
  for (int t : {100, 1000}) {
    int hits = 0;
    const int reps = 10000;
    for (int r = 0; r < reps; ++r) {
      Environment env(model, replication_seed(1006 + t, r));
      RunStats stats(d, K);
      for (int s = 0; s < t; ++s) stats.record(s % K, env.pull(s % K));
      hits += good_event_holds(stats, model, t) ? 1 : 0;
    }
    const double freq = double(hits) / reps;
    const double bound = 1.0 - double(d * K) / (double(t) * t) - 0.01;
    pass = pass && freq >= bound;
    detail += fmt("t=%d frequency %.4f vs bound %.4f; ", t, freq, bound);
  }
  return {pass, detail};
}

// Streams that punish a learner; each returns the loss vector for round t given current weights.
using Stream = std::function<std::vector<double>(std::size_t t, const SimplexWeights& w)>;

Stream make_stream(int kind, std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  const double range = hi - lo;
  switch (kind) {
    case 0:
      return [=, &rng](std::size_t, const SimplexWeights&) {
        std::uniform_real_distribution<double> u(lo, hi);
        std::vector<double> l(n);
        for (double& v : l) v = u(rng);
        return l;
      };
    case 1:
      return [=](std::size_t, const SimplexWeights& w) {
        std::vector<double> l(n, lo);
        const auto top = std::max_element(w.values().begin(), w.values().end()) - w.values().begin();
        l[static_cast<std::size_t>(top)] = hi;
        return l;
      };
    case 2:
      return [=](std::size_t t, const SimplexWeights&) {
        std::vector<double> l(n, lo);
        if (t == 0) {
          l[0] = lo + 0.5 * range;
        } else {
          l[t % 2 == 1 ? 1 % n : 0] = hi;
        }
        return l;
      };
    default:
      return [=, &rng](std::size_t t, const SimplexWeights&) {
        std::uniform_real_distribution<double> u(0.0, 0.3 * range);
        std::vector<double> l(n);
        const std::size_t good = (t / 1000) % n;
        for (std::size_t k = 0; k < n; ++k) l[k] = k == good ? lo + u(rng) : hi - u(rng);
        return l;
      };
  }
}

Verdict adahedge() {
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::size_t T = 10000;
  int ok = 0, total = 0;
  double worst_ratio = 0.0;
  for (std::size_t n : {2, 8}) {
    for (int s = 0; s < 100; ++s) {
      const double a = u(rng);
      const double b = a + 0.1 + std::abs(u(rng));
      Stream stream = make_stream(s % 4, n, a, b, rng);
      HedgeState h(n);
      double learner = 0.0;
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t t = 0; t < T; ++t) {
        const SimplexWeights w = h.weights();
        const std::vector<double> l = stream(t, w);
        for (std::size_t k = 0; k < n; ++k) {
          learner += w[k] * l[k];
          lo = std::min(lo, l[k]);
          hi = std::max(hi, l[k]);
        }
        h.update(l);
      }
      const auto cum = h.cum_loss();
      const double regret = learner - *std::min_element(cum.begin(), cum.end());
      const double range = hi - lo, ln = std::log(double(n));
      const double bound = 2.0 * std::sqrt(double(T) * ln * range * range) + (16.0 / 3.0) * range * ln + 2.0 * range;
      worst_ratio = std::max(worst_ratio, regret / bound);
      ok += regret <= bound ? 1 : 0;
      ++total;
    }
  }
  return {ok == total, fmt("%d/%d streams within bound, worst regret/bound %.3f", ok, total, worst_ratio)};
}

Verdict glr_oracle() {
  std::mt19937_64 rng(1008);
  std::uniform_int_distribution<int> count(5, 50);
  int ok = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix means = random_means(rng, 2, 3);
    std::vector<double> w(3);
    RunStats stats(2, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      const int n = count(rng);
      w[k] = n;
      const std::vector<double> obs = means.column(k);
      for (int s = 0; s < n; ++s) stats.record(k, obs);
    }
    const double value = glr(stats, Family::GaussianUnitVariance);
    const double grid = oracle::gaussian_alt_grid(means.to_rows(), w, best_answer(means), 0.01);
    const double rel = grid > 0.0 ? std::abs(value - grid) / grid : std::abs(value);
    worst = std::max(worst, rel);
    ok += rel <= 0.05 ? 1 : 0;
  }
  return {ok == 50, fmt("%d/50 within 5%%, worst relative error %.4f", ok, worst)};
}

struct BaiSummary {
  std::size_t runs = 0;
  std::size_t errors = 0;
  std::size_t truncated = 0;
  std::vector<double> taus;
  bool stopped_early = false;
};

BaiSummary run_bai(const BanditModel& model, BaiSampler sampler, std::size_t reps, std::uint64_t seed,
                   std::size_t error_cap) {
  BaiConfig cfg;
  cfg.delta = 0.1;
  cfg.sampler = sampler;
  cfg.max_rounds = 1000000;
  cfg.cadence_growth = 0.01;
  BaiSummary s;
  for (std::size_t r = 0; r < reps; ++r) {
    Environment env(model, replication_seed(seed, r));
    const BaiOutcome o = bai_run(env, cfg);
    ++s.runs;
    s.taus.push_back(double(o.tau));
    if (o.truncated) ++s.truncated;
    if (!o.correct) ++s.errors;
    if (o.truncated || s.errors > error_cap) {
      s.stopped_early = r + 1 < reps;
      break;
    }
  }
  return s;
}

Verdict delta_correct(const std::function<BanditModel(double)>& make, const char* label) {
  const std::size_t reps = 200;
  const double limit = 0.1 + 2.0 * std::sqrt(0.09 / reps);
  const auto cap = static_cast<std::size_t>(std::floor(limit * reps));
  bool pass = true;
  std::string detail = std::string(label) + ": ";
  for (BaiSampler sampler : {BaiSampler::DTracking, BaiSampler::Game}) {
    const BaiSummary a = run_bai(make(0.2), sampler, reps, 1009, cap);
    const double err = double(a.errors) / double(a.runs);
    bool ok = a.runs == reps && a.truncated == 0 && err <= limit;
    detail += fmt("%s eps=0.2 runs %zu errors %zu truncated %zu median tau %.0f%s; ", to_string(sampler).c_str(),
                  a.runs, a.errors, a.truncated, median(a.taus), a.stopped_early ? " (stopped: failure certain)" : "");
    if (ok) {
      const BaiSummary b = run_bai(make(0.4), sampler, reps, 1010, reps);
      const bool faster = b.truncated == 0 && median(b.taus) < median(a.taus);
      ok = faster;
      detail += fmt("%s eps=0.4 median tau %.0f truncated %zu; ", to_string(sampler).c_str(), median(b.taus),
                    b.truncated);
    }
    pass = pass && ok;
  }
  return {pass, detail};
}

Verdict tracking() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int ok = 0;
  double worst_excess = -INFINITY;
  for (int s = 0; s < 10000; ++s) {
    const std::size_t K = 2 + s % 7;
    std::vector<std::size_t> counts(K, 0);
    std::vector<double> cum(K, 0.0);
    double worst = -INFINITY;
    const int mode = s % 3;
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> w(K);
      if (mode == 0) {
        for (double& v : w) v = -std::log(1.0 - u(rng));
      } else if (mode == 1) {
        w[rng() % K] = 1.0;
      } else {
        for (double& v : w) v = std::pow(u(rng), 8.0);
      }
      const double sum = std::accumulate(w.begin(), w.end(), 0.0);
      for (std::size_t k = 0; k < K; ++k) cum[k] += sum > 0 ? w[k] / sum : 1.0 / K;
      ++counts[tracking_next(counts, cum)];
      for (std::size_t k = 0; k < K; ++k) worst = std::max(worst, cum[k] - double(counts[k]));
    }
    worst_excess = std::max(worst_excess, worst - double(K - 1));
    ok += worst <= double(K - 1) + 1e-9 ? 1 : 0;
  }
  return {ok == 10000, fmt("%d/10000 streams within K-1, worst margin %.4f", ok, worst_excess)};
}

Verdict perturbed_bai() {
  return delta_correct([](double e) { return gen_lb_alt_instance(e); }, "perturbed lower-bound instance");
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  bool extra = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (a == "--extra") {
      extra = true;
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N] [--extra]\n");
      return 2;
    }
  }

  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, optimal_weights},
      {2, closed_form},
      {3, reference_examples},
      {4, scaling},
      {5, vanishing},
      {6, concentration},
      {7, adahedge},
      {8, glr_oracle},
      {9, [] { return delta_correct([](double e) { return gen_lb_instance(e); }, "lower-bound instance"); }},
      {10, tracking},
  };

  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (only != 0 && only != id) continue;
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = run();
    std::printf("criterion %d: %s %s [%.1fs]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  if (extra) {
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = perturbed_bai();
    std::printf("supplementary: %s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", v.detail.c_str(), seconds_since(start));
  }
  return failures == 0 ? 0 : 1;
}
