#include "vecbandit/optweight.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vecbandit {

namespace {

constexpr double kFeasTol = 1e-12;

// Solves the square system a x = b in place by Gaussian elimination with partial pivoting.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-13) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    double s = b[col];
    for (std::size_t c = col + 1; c < n; ++c) s -= a[col][c] * b[c];
    b[col] = s / a[col][col];
  }
  return true;
}

double row_max(const Matrix& a, std::span<const double> alpha) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) s += a(i, c) * alpha[c];
    worst = std::max(worst, s);
  }
  return worst;
}

}  // namespace

void for_each_subset(std::size_t n, std::size_t m, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (m > n) return;
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t pos = m;
    bool advanced = false;
    while (pos-- > 0) {
      if (idx[pos] < pos + n - m) {
        ++idx[pos];
        for (std::size_t q = pos + 1; q < m; ++q) idx[q] = idx[q - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return;
  }
}

InnerSolution inner_minmax(const Matrix& sub) {
  const std::size_t rows = sub.rows();
  const std::size_t cols = sub.cols();
  if (cols == 0) throw std::invalid_argument("inner_minmax needs at least one column");
  if (rows == 0) return {SimplexWeights::uniform(cols), 0.0};

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_alpha;
  const std::size_t max_size = std::min(rows, cols);
  for (std::size_t m = 1; m <= max_size; ++m) {
    for_each_subset(cols, m, [&](const std::vector<std::size_t>& colset) {
      for_each_subset(rows, m, [&](const std::vector<std::size_t>& rowset) {
        // Unknowns: alpha over colset, then tau.
        std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 0.0));
        std::vector<double> b(m + 1, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
          for (std::size_t c = 0; c < m; ++c) a[r][c] = sub(rowset[r], colset[c]);
          a[r][m] = -1.0;
        }
        for (std::size_t c = 0; c < m; ++c) a[m][c] = 1.0;
        b[m] = 1.0;
        if (!solve_linear(a, b)) return;
        std::vector<double> alpha(cols, 0.0);
        for (std::size_t c = 0; c < m; ++c) {
          if (b[c] < -kFeasTol) return;
          alpha[colset[c]] = std::max(b[c], 0.0);
        }
        const double tau = b[m];
        const double achieved = row_max(sub, alpha);
        if (achieved > tau + 1e-10) return;
        if (achieved < best - kFeasTol) {
          best = achieved;
          best_alpha = std::move(alpha);
        }
      });
    });
  }
  if (best_alpha.empty()) throw std::logic_error("inner_minmax found no feasible vertex");
  const double total = std::accumulate(best_alpha.begin(), best_alpha.end(), 0.0);
  for (double& v : best_alpha) v /= total;
  SimplexWeights w(std::move(best_alpha));
  return {w, row_max(sub, w.values())};
}

PairSolution pair_loss_d2(std::span<const double> relk, std::span<const double> rell) {
  if (relk.size() != 2 || rell.size() != 2) throw std::invalid_argument("pair_loss_d2 needs 2-vectors");
  const double k1 = relk[0], k2 = relk[1], l1 = rell[0], l2 = rell[1];
  const double max_k = std::max(k1, k2);
  const double max_l = std::max(l1, l2);
  if (k1 <= l1 && k2 <= l2) return {max_k, 1.0, 1};
  if (l1 <= k1 && l2 <= k2) return {max_l, 0.0, 2};
  auto single = [&](int case_id) {
    return max_k <= max_l ? PairSolution{max_k, 1.0, case_id} : PairSolution{max_l, 0.0, case_id};
  };
  if ((k1 - k2) * (l1 - l2) > 0.0) return single(3);
  const double denom = k1 + l2 - l1 - k2;
  if (std::abs(denom) < 1e-12) return single(4);
  const double value = (k1 * l2 - l1 * k2) / denom;
  const double alpha = std::clamp((l2 - l1) / denom, 0.0, 1.0);
  return {value, alpha, 4};
}

OptWeightResult solve_minmax_simplex(const RelativeLossMatrix& rel) {
  const std::size_t d = rel.dims();
  const std::size_t K = rel.arms();
  if (K == 0 || d == 0) throw std::invalid_argument("empty relative loss matrix");

  std::vector<std::size_t> unique;
  for (std::size_t k = 0; k < K; ++k) {
    bool dup = false;
    for (std::size_t u : unique) {
      bool same = true;
      for (std::size_t i = 0; i < d && same; ++i) same = rel.values(i, k) == rel.values(i, u);
      if (same) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(k);
  }

  const std::size_t m = std::min(d, unique.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_w;
  for_each_subset(unique.size(), m, [&](const std::vector<std::size_t>& pick) {
    std::vector<std::size_t> cols(m);
    for (std::size_t c = 0; c < m; ++c) cols[c] = unique[pick[c]];
    const InnerSolution inner = inner_minmax(rel.values.select_columns(cols));
    if (inner.value < best - 1e-12) {
      best = inner.value;
      best_w.assign(K, 0.0);
      for (std::size_t c = 0; c < m; ++c) best_w[cols[c]] = inner.alpha[c];
    }
  });

  OptWeightResult out;
  out.weights = SimplexWeights(std::move(best_w));
  out.value = weight_relative_loss(out.weights.values(), rel);
  out.support = support(out.weights.values(), 1e-9);
  return out;
}

GridResult grid_oracle(const RelativeLossMatrix& rel, double step) {
  const std::size_t K = rel.arms();
  const std::size_t d = rel.dims();
  if (K > 5) throw std::invalid_argument("grid_oracle supports at most 5 arms");
  if (!(step >= 1.0 / 400.0 - 1e-15) || step > 1.0) throw std::invalid_argument("grid step must be in [1/400, 1]");
  const long n = std::lround(1.0 / step);

  GridResult best{std::vector<double>(K, 0.0), std::numeric_limits<double>::infinity()};
  std::vector<long> counts(K, 0);
  // partial[k][i]: dot product of row i with the first k coordinates (in lattice units).
  std::vector<std::vector<double>> partial(K + 1, std::vector<double>(d, 0.0));

  std::function<void(std::size_t, long)> rec = [&](std::size_t k, long left) {
    if (k + 1 == K) {
      counts[k] = left;
      double worst = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        worst = std::max(worst, partial[k][i] + rel.values(i, k) * static_cast<double>(left));
      worst /= static_cast<double>(n);
      if (worst < best.value) {
        best.value = worst;
        for (std::size_t q = 0; q < K; ++q) best.weights[q] = static_cast<double>(counts[q]) / static_cast<double>(n);
      }
      return;
    }
    for (long c = 0; c <= left; ++c) {
      counts[k] = c;
      for (std::size_t i = 0; i < d; ++i) partial[k + 1][i] = partial[k][i] + rel.values(i, k) * static_cast<double>(c);
      rec(k + 1, left - c);
    }
  };
  rec(0, n);
  return best;
}

std::vector<std::size_t> support(std::span<const double> w, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] > tol) out.push_back(k);
  return out;
}

}  // namespace vecbandit
