#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vecbandit/bai.hpp"
#include "vecbandit/core_model.hpp"
#include "vecbandit/regret_algos.hpp"

namespace vecbandit {

// JSON instance format: {"family": "gaussian"|"bernoulli", "means": [[row per dimension]]}.
BanditModel parse_instance(const std::string& text);
std::string serialize_instance(const BanditModel& model);
BanditModel load_instance(const std::string& path);
void save_instance(const BanditModel& model, const std::string& path);

// Two dimensions, three arms: (1,0), (0,1), (1/2,1/2).
BanditModel gen_table1(Family family = Family::Bernoulli);
// Gaussian arms (1/4,3/4), (3/4,1/4), ((3-e)/8,(3+e)/8), ((3+e)/8,(3-e)/8). Needs 0 < e < 1.
BanditModel gen_lb_instance(double epsilon);
// Same as gen_lb_instance with the first arm moved to ((1-e)/4, 3/4).
BanditModel gen_lb_alt_instance(double epsilon);
// Means drawn uniformly from [0,1].
BanditModel gen_random_instance(std::mt19937_64& rng, std::size_t arms, std::size_t dims, Family family);

struct RegretRow {
  std::size_t run_id = 0;
  std::string algo;
  std::size_t T = 0;
  std::uint64_t seed = 0;
  double regret = 0.0;
  double runtime_ms = 0.0;
  bool clamped_N = false;
};

struct BaiRow {
  std::size_t run_id = 0;
  std::string algo;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t tau = 0;
  std::size_t answer = 0;  // 1-based
  bool correct = false;
  bool truncated = false;
};

struct ExperimentConfig {
  BanditModel model{Family::Bernoulli, Matrix(1, 1, 0.5)};
  std::string algo;  // cp, cg, cg-adaptive, tas, game
  std::vector<std::size_t> horizons;
  std::vector<double> deltas;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> N;  // forced-exploration override for cp and cg
  BaiConfig bai;
  bool record_timing = true;
  std::size_t threads = 0;  // 0: VECBANDIT_THREADS or hardware concurrency
};

struct ExperimentResult {
  std::vector<RegretRow> regret;
  std::vector<BaiRow> bai;
};

bool is_regret_algo(const std::string& tag);
bool is_bai_algo(const std::string& tag);

// Runs every (grid point, replication) pair; rows are ordered by run_id = grid_index * reps + rep.
// Replication r uses seed replication_seed(cfg.seed, r) at every grid point.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::size_t worker_count(std::size_t requested, std::size_t jobs);

extern const char* const kRegretCsvHeader;
extern const char* const kBaiCsvHeader;

void write_regret_csv(std::ostream& os, const std::vector<RegretRow>& rows);
void write_bai_csv(std::ostream& os, const std::vector<BaiRow>& rows);
std::vector<RegretRow> read_regret_csv(std::istream& is);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // points dropped for nonpositive regret
};

// Least squares on (ln T, ln regret). Needs at least three positive points.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

// Mean regret per horizon, sorted by T.
std::vector<std::pair<double, double>> mean_regret_by_horizon(const std::vector<RegretRow>& rows);

}  // namespace vecbandit
