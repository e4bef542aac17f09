// Command-line front end: optimal weights, regret and BAI experiments, instance generation,
// and slope fitting.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vecbandit/bai.hpp"
#include "vecbandit/harness.hpp"
#include "vecbandit/optweight.hpp"

namespace fs = std::filesystem;
using namespace vecbandit;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_vec(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
  return s + ")";
}

std::string fmt_arms(const std::vector<std::size_t>& arms) {
  std::string s = "{";
  for (std::size_t k = 0; k < arms.size(); ++k) s += (k ? "," : "") + std::to_string(arms[k] + 1);
  return s + "}";
}

std::vector<std::size_t> parse_horizons(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size() || v == 0) throw std::invalid_argument("bad horizon '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw std::invalid_argument("no horizons given");
  return out;
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

int cmd_weights(const std::string& instance, double grid_step) {
  const BanditModel model = load_instance(instance);
  const RelativeLossMatrix rel = relative_losses(model);
  const OptWeightResult res = solve_minmax_simplex(rel);
  std::cout << "weights " << fmt_vec(res.weights.values()) << "\n";
  std::cout << "value " << fmt(res.value) << "\n";
  std::cout << "support " << fmt_arms(res.support) << "\n";
  std::cout << "best_answer " << best_answer(model.means()) + 1 << "\n";
  if (grid_step > 0.0) {
    const GridResult grid = grid_oracle(rel, grid_step);
    const double slack = static_cast<double>(model.dims() * model.arms()) * grid_step;
    const bool ok = res.value <= grid.value + 1e-9 && res.value >= grid.value - slack;
    std::cout << "grid_value " << fmt(grid.value) << " grid_weights " << fmt_vec(grid.weights) << "\n";
    std::cout << "grid_check " << (ok ? "ok" : "mismatch") << "\n";
    return ok ? 0 : 1;
  }
  return 0;
}

int cmd_regret(const std::string& algo, const std::string& instance, const std::string& horizons, std::size_t reps,
               std::uint64_t seed, const std::string& out, std::size_t N, bool no_timing) {
  if (!is_regret_algo(algo)) throw std::invalid_argument("unknown regret algorithm '" + algo + "'");
  ExperimentConfig cfg;
  cfg.model = load_instance(instance);
  cfg.algo = algo;
  cfg.horizons = parse_horizons(horizons);
  cfg.reps = reps;
  cfg.seed = seed;
  if (N > 0) cfg.N = N;
  cfg.record_timing = !no_timing;
  const ExperimentResult res = run_experiment(cfg);
  const fs::path path = prepare_out_dir(out) / "regret.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_regret_csv(os, res.regret);
  for (const auto& [T, mean] : mean_regret_by_horizon(res.regret))
    std::cout << "T=" << static_cast<std::size_t>(T) << " mean_regret=" << fmt(mean) << "\n";
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_bai(const std::string& algo, const std::string& instance, double delta, std::size_t reps, std::uint64_t seed,
            const std::string& out, std::size_t max_rounds, std::size_t cadence, double growth) {
  if (!is_bai_algo(algo)) throw std::invalid_argument("unknown BAI algorithm '" + algo + "'");
  ExperimentConfig cfg;
  cfg.model = load_instance(instance);
  cfg.algo = algo;
  cfg.deltas = {delta};
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.bai.max_rounds = max_rounds;
  cfg.bai.cadence = cadence;
  cfg.bai.cadence_growth = growth;
  const ExperimentResult res = run_experiment(cfg);
  const fs::path path = prepare_out_dir(out) / "bai.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_bai_csv(os, res.bai);
  std::size_t errors = 0, truncated = 0;
  for (const BaiRow& r : res.bai) {
    errors += r.correct ? 0 : 1;
    truncated += r.truncated ? 1 : 0;
  }
  std::cout << "runs=" << res.bai.size() << " errors=" << errors << " truncated=" << truncated << "\n";
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_chartime(const std::string& instance) {
  const BanditModel model = load_instance(instance);
  const std::size_t answer = best_answer(model.means());
  std::cout << "best_answer " << answer + 1 << "\n";
  if (!best_answer_unique(model.means())) {
    std::cout << "best answer is not unique: characteristic time is infinite\n";
    return 1;
  }
  const OracleResult res = oracle_weights(model.means(), model.family());
  std::cout << "oracle_weights " << fmt_vec(res.omega.values()) << "\n";
  std::cout << "inverse_chartime " << fmt(res.value) << "\n";
  std::cout << "chartime " << fmt(res.t_star) << "\n";
  return 0;
}

int cmd_gen(const std::string& kind, double epsilon, const std::string& out, const std::string& family) {
  BanditModel model = kind == "table1" ? gen_table1(family_from_string(family))
                      : kind == "lb"   ? gen_lb_instance(epsilon)
                      : kind == "lb-alt"
                          ? gen_lb_alt_instance(epsilon)
                          : throw std::invalid_argument("unknown instance kind '" + kind + "'");
  save_instance(model, out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_slope(const std::string& in) {
  std::ifstream is(in);
  if (!is) throw std::runtime_error("cannot open " + in);
  const std::vector<RegretRow> rows = read_regret_csv(is);
  std::map<std::string, std::vector<RegretRow>> by_algo;
  for (const RegretRow& r : rows) by_algo[r.algo].push_back(r);
  for (const auto& [algo, group] : by_algo) {
    const SlopeFit fit = fit_slope(mean_regret_by_horizon(group));
    std::cout << algo << " slope=" << fmt(fit.slope) << " intercept=" << fmt(fit.intercept) << " r2=" << fmt(fit.r2)
              << " points=" << fit.used;
    if (fit.excluded > 0) std::cout << " excluded_nonpositive=" << fit.excluded;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector-loss bandits: optimal weights, regret minimization and best-arm identification"};
  app.require_subcommand(1);

  std::string instance, algo, out, horizons, kind, in, family = "bernoulli";
  double grid_step = 0.0, delta = 0.1, epsilon = 0.1, growth = 0.0;
  std::size_t reps = 1, N = 0, max_rounds = 1000000, cadence = 10;
  std::uint64_t seed = 0;
  bool no_timing = false;

  auto* weights = app.add_subcommand("weights", "Optimal weight of the instance");
  weights->add_option("--instance", instance, "Instance JSON")->required();
  weights->add_option("--grid-check", grid_step, "Compare against a simplex grid with this spacing");

  auto* regret = app.add_subcommand("regret", "Replicated regret experiment");
  regret->add_option("--algo", algo, "cp | cg | cg-adaptive")->required();
  regret->add_option("--instance", instance, "Instance JSON")->required();
  regret->add_option("--horizons", horizons, "Comma-separated horizons")->required();
  regret->add_option("--reps", reps, "Replications")->required();
  regret->add_option("--seed", seed, "Base seed")->required();
  regret->add_option("--out", out, "Output directory")->required();
  regret->add_option("--N", N, "Forced rounds per arm (default: the theory value)");
  regret->add_flag("--no-timing", no_timing, "Write runtime_ms as 0 for byte-stable output");

  auto* bai = app.add_subcommand("bai", "Replicated best-arm identification experiment");
  bai->add_option("--algo", algo, "tas | game")->required();
  bai->add_option("--instance", instance, "Instance JSON")->required();
  bai->add_option("--delta", delta, "Confidence level")->required();
  bai->add_option("--reps", reps, "Replications")->required();
  bai->add_option("--seed", seed, "Base seed")->required();
  bai->add_option("--out", out, "Output directory")->required();
  bai->add_option("--max-rounds", max_rounds, "Truncation cap");
  bai->add_option("--cadence", cadence, "Oracle re-solve period");
  bai->add_option("--cadence-growth", growth, "Re-solve at least every growth * t rounds");

  auto* chartime = app.add_subcommand("chartime", "Oracle weights and characteristic time");
  chartime->add_option("--instance", instance, "Instance JSON")->required();

  auto* gen = app.add_subcommand("gen", "Write a built-in instance");
  gen->add_option("--kind", kind, "table1 | lb | lb-alt")->required();
  gen->add_option("--epsilon", epsilon, "Gap parameter of the lb family");
  gen->add_option("--out", out, "Output JSON path")->required();
  gen->add_option("--family", family, "Family for table1: bernoulli | gaussian");

  auto* slope = app.add_subcommand("slope", "Fit log-log slope of mean regret per algorithm");
  slope->add_option("--in", in, "regret.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*weights) return cmd_weights(instance, grid_step);
    if (*regret) return cmd_regret(algo, instance, horizons, reps, seed, out, N, no_timing);
    if (*bai) return cmd_bai(algo, instance, delta, reps, seed, out, max_rounds, cadence, growth);
    if (*chartime) return cmd_chartime(instance);
    if (*gen) return cmd_gen(kind, epsilon, out, family);
    if (*slope) return cmd_slope(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
