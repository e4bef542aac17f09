#include "vecbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "vecbandit/env_sim.hpp"
#include "vecbandit/optweight.hpp"

namespace vecbandit {

using json = nlohmann::json;

BanditModel parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed instance JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("family") || !doc.contains("means"))
    throw std::invalid_argument("instance needs 'family' and 'means'");
  if (!doc["family"].is_string()) throw std::invalid_argument("'family' must be a string");
  const Family family = family_from_string(doc["family"].get<std::string>());
  const json& means = doc["means"];
  if (!means.is_array() || means.empty()) throw std::invalid_argument("'means' must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const json& row : means) {
    if (!row.is_array() || row.empty()) throw std::invalid_argument("each row of 'means' must be a non-empty array");
    std::vector<double> r;
    for (const json& v : row) {
      if (!v.is_number()) throw std::invalid_argument("means must be numbers");
      r.push_back(v.get<double>());
    }
    if (!rows.empty() && r.size() != rows.front().size()) throw std::invalid_argument("ragged rows in 'means'");
    rows.push_back(std::move(r));
  }
  return BanditModel(family, Matrix::from_rows(rows));
}

std::string serialize_instance(const BanditModel& model) {
  json doc;
  doc["family"] = to_string(model.family());
  doc["means"] = model.means().to_rows();
  return doc.dump();
}

BanditModel load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

void save_instance(const BanditModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file '" + path + "'");
  out << serialize_instance(model) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

BanditModel gen_table1(Family family) {
  return BanditModel(family, Matrix::from_rows({{1.0, 0.0, 0.5}, {0.0, 1.0, 0.5}}));
}

BanditModel gen_lb_instance(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::out_of_range("epsilon must lie in (0,1)");
  const double e = epsilon;
  return BanditModel(Family::GaussianUnitVariance,
                     Matrix::from_rows({{0.25, 0.75, (3.0 - e) / 8.0, (3.0 + e) / 8.0},
                                        {0.75, 0.25, (3.0 + e) / 8.0, (3.0 - e) / 8.0}}));
}

BanditModel gen_lb_alt_instance(double epsilon) {
  BanditModel base = gen_lb_instance(epsilon);
  Matrix m = base.means();
  m(0, 0) = (1.0 - epsilon) / 4.0;
  return BanditModel(Family::GaussianUnitVariance, m);
}

BanditModel gen_random_instance(std::mt19937_64& rng, std::size_t arms, std::size_t dims, Family family) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(dims, arms);
  for (std::size_t i = 0; i < dims; ++i)
    for (std::size_t k = 0; k < arms; ++k) m(i, k) = u(rng);
  return BanditModel(family, m);
}

bool is_regret_algo(const std::string& tag) { return tag == "cp" || tag == "cg" || tag == "cg-adaptive"; }
bool is_bai_algo(const std::string& tag) { return tag == "tas" || tag == "game"; }

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("VECBANDIT_THREADS")) {
      char* end = nullptr;
      const unsigned long v = std::strtoul(env, &end, 10);
      if (end != env && v > 0) n = v;
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

namespace {

template <class Fn>
void run_parallel(std::size_t jobs, std::size_t threads, Fn&& fn) {
  const std::size_t workers = worker_count(threads, jobs);
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t j = next.fetch_add(1);
        if (j >= jobs) return;
        try {
          fn(j);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

RegretRow regret_job(const ExperimentConfig& cfg, RegretAlgo algo, std::size_t T, std::size_t run_id,
                     std::uint64_t seed, double psi_star) {
  const auto start = std::chrono::steady_clock::now();
  Environment env(cfg.model, seed);
  RegretRow row;
  row.run_id = run_id;
  row.algo = to_string(algo);
  row.T = T;
  row.seed = seed;
  Trajectory traj;
  if (algo == RegretAlgo::CGAdaptive) {
    traj = cg_adaptive_run(env, T);
  } else {
    ForcedRounds n = default_N(algo, T, cfg.model.arms());
    if (cfg.N) n = {*cfg.N, false};
    row.clamped_N = n.clamped;
    traj = algo == RegretAlgo::CP ? cp_run(env, T, n.n) : cg_run(env, T, n.n).trajectory;
  }
  row.regret = regret_of(traj, cfg.model, psi_star);
  if (cfg.record_timing)
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.reps == 0) throw std::invalid_argument("replications must be at least 1");
  ExperimentResult out;
  if (is_regret_algo(cfg.algo)) {
    if (cfg.horizons.empty()) throw std::invalid_argument("no horizons given");
    for (std::size_t h = 1; h < cfg.horizons.size(); ++h)
      if (cfg.horizons[h] <= cfg.horizons[h - 1]) throw std::invalid_argument("horizons must be strictly increasing");
    const RegretAlgo algo = regret_algo_from_string(cfg.algo);
    const double psi_star = solve_minmax_simplex(relative_losses(cfg.model)).value;
    const std::size_t jobs = cfg.horizons.size() * cfg.reps;
    out.regret.resize(jobs);
    run_parallel(jobs, cfg.threads, [&](std::size_t j) {
      const std::size_t rep = j % cfg.reps;
      out.regret[j] = regret_job(cfg, algo, cfg.horizons[j / cfg.reps], j, replication_seed(cfg.seed, rep), psi_star);
    });
  } else if (is_bai_algo(cfg.algo)) {
    if (cfg.deltas.empty()) throw std::invalid_argument("no confidence levels given");
    const std::size_t jobs = cfg.deltas.size() * cfg.reps;
    out.bai.resize(jobs);
    run_parallel(jobs, cfg.threads, [&](std::size_t j) {
      const std::size_t rep = j % cfg.reps;
      BaiConfig bc = cfg.bai;
      bc.delta = cfg.deltas[j / cfg.reps];
      bc.sampler = bai_sampler_from_string(cfg.algo);
      const std::uint64_t seed = replication_seed(cfg.seed, rep);
      Environment env(cfg.model, seed);
      const BaiOutcome o = bai_run(env, bc);
      out.bai[j] = BaiRow{j, cfg.algo, bc.delta, seed, o.tau, o.answer + 1, o.correct, o.truncated};
    });
  } else {
    throw std::invalid_argument("unknown algorithm '" + cfg.algo + "'");
  }
  return out;
}

const char* const kRegretCsvHeader = "run_id,algo,T,seed,regret,runtime_ms,clamped_N";
const char* const kBaiCsvHeader = "run_id,algo,delta,seed,tau,answer,correct,truncated";

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_regret_csv(std::ostream& os, const std::vector<RegretRow>& rows) {
  os << kRegretCsvHeader << '\n';
  for (const RegretRow& r : rows) {
    os << r.run_id << ',' << r.algo << ',' << r.T << ',' << r.seed << ',' << fmt_double(r.regret) << ','
       << fmt_double(r.runtime_ms) << ',' << (r.clamped_N ? 1 : 0) << '\n';
  }
}

void write_bai_csv(std::ostream& os, const std::vector<BaiRow>& rows) {
  os << kBaiCsvHeader << '\n';
  for (const BaiRow& r : rows) {
    os << r.run_id << ',' << r.algo << ',' << fmt_double(r.delta) << ',' << r.seed << ',' << r.tau << ','
       << r.answer << ',' << (r.correct ? 1 : 0) << ',' << (r.truncated ? 1 : 0) << '\n';
  }
}

std::vector<RegretRow> read_regret_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty regret CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRegretCsvHeader) throw std::runtime_error("unexpected regret CSV header: " + line);
  std::vector<RegretRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 7) throw std::runtime_error("regret CSV line " + std::to_string(lineno) + " has wrong field count");
    try {
      RegretRow r;
      r.run_id = std::stoull(f[0]);
      r.algo = f[1];
      r.T = std::stoull(f[2]);
      r.seed = std::stoull(f[3]);
      r.regret = std::stod(f[4]);
      r.runtime_ms = std::stod(f[5]);
      r.clamped_N = f[6] == "1";
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("regret CSV line " + std::to_string(lineno) + " is malformed");
    }
  }
  return rows;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  SlopeFit fit;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [T, regret] : points) {
    if (!(T > 0.0) || !(regret > 0.0)) {
      ++fit.excluded;
      continue;
    }
    logs.emplace_back(std::log(T), std::log(regret));
  }
  fit.used = logs.size();
  if (logs.size() < 3) throw std::invalid_argument("slope fit needs at least three positive points");
  const double n = static_cast<double>(logs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("slope fit needs distinct horizons");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::vector<std::pair<double, double>> mean_regret_by_horizon(const std::vector<RegretRow>& rows) {
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  for (const RegretRow& r : rows) {
    auto& a = acc[r.T];
    a.first += r.regret;
    ++a.second;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [T, a] : acc) out.emplace_back(static_cast<double>(T), a.first / static_cast<double>(a.second));
  return out;
}

}  // namespace vecbandit
