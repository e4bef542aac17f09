#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vecbandit/core_model.hpp"

namespace vecbandit {

struct OptWeightResult {
  SimplexWeights weights;
  double value = 0.0;
  std::vector<std::size_t> support;  // sorted
};

// A size-d subset of arms, sorted ascending.
struct CombinatorialArm {
  std::vector<std::size_t> arms;
};

struct InnerSolution {
  SimplexWeights alpha;
  double value = 0.0;
};

// min over alpha in the simplex of max_i row_i . alpha, for an r x c matrix.
// Solved exactly by enumerating vertex bases of the small LP
// {min tau : sub * alpha <= tau, alpha in simplex}.
InnerSolution inner_minmax(const Matrix& sub);

struct PairSolution {
  double value = 0.0;
  double alpha_k = 0.0;  // weight on the first arm; the second gets 1 - alpha_k
  int case_id = 0;       // 1: first dominates, 2: second dominates, 3: same side, 4: crossing
};

// Closed form of inner_minmax for two arms in two dimensions.
PairSolution pair_loss_d2(std::span<const double> relk, std::span<const double> rell);

// argmin over the simplex of the ell-infinity relative loss.
OptWeightResult solve_minmax_simplex(const RelativeLossMatrix& rel);

struct GridResult {
  std::vector<double> weights;
  double value = 0.0;
};

// Exhaustive search over the simplex lattice with the given spacing. Needs K <= 5, step >= 1/400.
GridResult grid_oracle(const RelativeLossMatrix& rel, double step);

// Calls fn on every size-m subset of {0, ..., n-1}, in lexicographic order.
void for_each_subset(std::size_t n, std::size_t m, const std::function<void(const std::vector<std::size_t>&)>& fn);

std::vector<std::size_t> support(std::span<const double> w, double tol = 1e-9);

}  // namespace vecbandit
