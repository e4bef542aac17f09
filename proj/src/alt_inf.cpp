#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vecbandit/bai.hpp"

namespace vecbandit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One summand w * d(c, y + shift) of a per-dimension problem in the level y.
// Lower terms only cost when y + shift > c, Upper terms only when y + shift < c.
enum class Side { Lower, Upper, Exact };

struct Term {
  double w;
  double c;
  double shift;
  Side side;
};

bool active(const Term& t, double y) {
  const double v = y + t.shift;
  switch (t.side) {
    case Side::Lower:
      return v > t.c;
    case Side::Upper:
      return v < t.c;
    case Side::Exact:
      return true;
  }
  return false;
}

double cost_at(const std::vector<Term>& terms, double y, Family family) {
  double s = 0.0;
  for (const Term& t : terms)
    if (active(t, y)) s += t.w * divergence(family, t.c, y + t.shift);
  return s;
}

double slope_at(const std::vector<Term>& terms, double y, Family family) {
  double g = 0.0;
  for (const Term& t : terms) {
    if (!active(t, y)) continue;
    const double v = y + t.shift;
    if (family == Family::GaussianUnitVariance) {
      g += t.w * (v - t.c);
    } else {
      g += t.w * (v - t.c) / (v * (1.0 - v));
    }
  }
  return g;
}

struct Bounds {
  double lo;
  double hi;
};

Bounds domain(Family family) {
  return family == Family::Bernoulli ? Bounds{1e-9, 1.0 - 1e-9} : Bounds{0.0, 1.0};
}

// Minimizes a convex sum of terms over y in [lo, hi]. Returns the minimizer.
double minimize_level(const std::vector<Term>& terms, double lo, double hi, Family family) {
  if (hi <= lo) return lo;
  if (slope_at(terms, lo, family) >= 0.0) return lo;
  if (slope_at(terms, hi, family) <= 0.0) return hi;

  if (family == Family::GaussianUnitVariance) {
    // The slope is piecewise linear with kinks at c - shift; bracket the root between kinks.
    double left = lo;
    double right = hi;
    for (const Term& t : terms) {
      if (t.side == Side::Exact) continue;
      const double b = t.c - t.shift;
      if (b <= left || b >= right) continue;
      if (slope_at(terms, b, family) <= 0.0) {
        left = b;
      } else {
        right = b;
      }
    }
    const double mid = 0.5 * (left + right);
    double num = 0.0;
    double den = 0.0;
    for (const Term& t : terms) {
      if (!active(t, mid)) continue;
      num += t.w * (t.c - t.shift);
      den += t.w;
    }
    if (den <= 0.0) return mid;
    return std::clamp(num / den, left, right);
  }

  double left = lo;
  double right = hi;
  for (int it = 0; it < 200 && right - left > 1e-14; ++it) {
    const double mid = 0.5 * (left + right);
    if (slope_at(terms, mid, family) <= 0.0) {
      left = mid;
    } else {
      right = mid;
    }
  }
  return 0.5 * (left + right);
}

// Cheapest way to bring an entry that must rise (level c_up) and one that must fall
// (level c_down) to a common value: min_v w_up d(c_up, v)[v > c_up] + w_down d(c_down, v)[v < c_down].
double meet_cost(double w_up, double c_up, double w_down, double c_down, Family family) {
  if (c_up >= c_down || w_up <= 0.0 || w_down <= 0.0) return 0.0;
  if (family == Family::GaussianUnitVariance) {
    const double gap = c_down - c_up;
    return 0.5 * w_up * w_down * gap * gap / (w_up + w_down);
  }
  const std::vector<Term> terms{Term{w_up, c_up, 0.0, Side::Lower}, Term{w_down, c_down, 0.0, Side::Upper}};
  const double v = minimize_level(terms, c_up, c_down, family);
  return cost_at(terms, v, family);
}

struct Problem {
  std::span<const double> w;
  const Matrix& means;
  Family family;
  std::size_t answer;
  Bounds box;
};

// Per-dimension terms for one piece at level x.
void build_terms(const Problem& p, const AltCase& piece, std::size_t i, double x, std::vector<Term>& terms) {
  terms.clear();
  for (std::size_t k = 0; k < p.means.cols(); ++k) {
    const double w = p.w[k];
    if (w <= 0.0) continue;
    const double c = p.means(i, k);
    if (i == piece.dim && k == piece.attainer) {
      terms.push_back({w, c, 0.0, Side::Exact});
    } else if (k == piece.k_star) {
      terms.push_back({w, c, 0.0, Side::Lower});
      terms.push_back({w, c, x, Side::Upper});
    } else if (k == p.answer && i == piece.dim) {
      terms.push_back({w, c, x, Side::Lower});
    } else {
      terms.push_back({w, c, 0.0, Side::Lower});
    }
  }
}

double level_hi(const Problem& p, const AltCase& piece, std::size_t i, double x) {
  return i == piece.dim ? p.box.hi - x : p.box.hi;
}

struct PieceEval {
  double cost = 0.0;
  std::vector<double> levels;
};

double eval_cost(const Problem& p, const AltCase& piece, double x, double* levels = nullptr) {
  thread_local std::vector<Term> terms;
  double cost = 0.0;
  for (std::size_t i = 0; i < p.means.rows(); ++i) {
    build_terms(p, piece, i, x, terms);
    const double y = minimize_level(terms, p.box.lo, level_hi(p, piece, i, x), p.family);
    if (levels) levels[i] = y;
    cost += cost_at(terms, y, p.family);
  }
  return cost;
}

PieceEval eval_piece(const Problem& p, const AltCase& piece, double x) {
  PieceEval out;
  out.levels.resize(p.means.rows());
  out.cost = eval_cost(p, piece, x, out.levels.data());
  return out;
}

double max_level(const Problem& p, const AltCase& piece) {
  return piece.attainer == p.answer ? 0.0 : p.box.hi - p.box.lo;
}

// Golden-section search on the convex profile over x.
AltCase solve_piece(const Problem& p, AltCase piece, double& cost) {
  const double top = max_level(p, piece);
  if (top <= 0.0) {
    piece.x = 0.0;
    cost = eval_cost(p, piece, 0.0);
    return piece;
  }
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0;
  double b = top;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = eval_cost(p, piece, c);
  double fd = eval_cost(p, piece, d);
  while (b - a > 1e-10) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = eval_cost(p, piece, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = eval_cost(p, piece, d);
    }
  }
  double best_x = 0.5 * (a + b);
  double best = eval_cost(p, piece, best_x);
  for (double edge : {0.0, top}) {
    const double f = eval_cost(p, piece, edge);
    if (f < best) {
      best = f;
      best_x = edge;
    }
  }
  piece.x = best_x;
  cost = best;
  return piece;
}

Matrix piece_lambda(const Problem& p, const AltCase& piece) {
  const PieceEval ev = eval_piece(p, piece, piece.x);
  Matrix lambda(p.means.rows(), p.means.cols());
  for (std::size_t i = 0; i < p.means.rows(); ++i) {
    const double y = ev.levels[i];
    for (std::size_t k = 0; k < p.means.cols(); ++k) {
      const double c = p.means(i, k);
      double v;
      if (i == piece.dim && k == piece.attainer) {
        v = y;
      } else if (k == piece.k_star) {
        v = std::clamp(c, y, y + piece.x);
      } else if (k == p.answer && i == piece.dim) {
        v = std::max(c, y + piece.x);
      } else {
        v = std::max(c, y);
      }
      lambda(i, k) = v;
    }
  }
  return lambda;
}

double worst_relative(const Matrix& m, std::size_t k) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    worst = std::max(worst, m(i, k) - *std::min_element(row.begin(), row.end()));
  }
  return worst;
}

// Moves a closure point strictly into the alternative set.
Matrix push_inside(Matrix lambda, std::size_t answer, std::size_t k_star) {
  if (best_answer(lambda) != answer) return lambda;
  for (double eps = 1e-12; eps < 1e-6; eps *= 10.0) {
    Matrix trial = lambda;
    for (std::size_t i = 0; i < trial.rows(); ++i) {
      trial(i, k_star) -= eps;
      trial(i, answer) += eps;
    }
    if (best_answer(trial) != answer) return trial;
  }
  return lambda;
}

void check_caps(std::span<const double> weights, const Matrix& means, std::size_t answer) {
  if (means.rows() == 0 || means.cols() == 0) throw std::invalid_argument("empty mean matrix");
  if (means.rows() > 3 || means.cols() > 8)
    throw std::invalid_argument("alternative-set projection supports d <= 3 and K <= 8");
  if (weights.size() != means.cols()) throw std::invalid_argument("weight length does not match arms");
  if (answer >= means.cols()) throw std::out_of_range("answer index out of range");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
}

}  // namespace

double alt_piece_cost(std::span<const double> weights, const Matrix& means, Family family, std::size_t answer,
                      const AltCase& piece) {
  check_caps(weights, means, answer);
  if (piece.k_star == answer || piece.k_star >= means.cols() || piece.dim >= means.rows() ||
      piece.attainer >= means.cols())
    return kInf;
  const Problem p{weights, means, family, answer, domain(family)};
  const double x = std::clamp(piece.x, 0.0, max_level(p, piece));
  return eval_cost(p, piece, x);
}

AltSolution alt_inf(std::span<const double> weights, const Matrix& means, Family family, std::size_t answer) {
  check_caps(weights, means, answer);
  const std::size_t K = means.cols();
  const std::size_t d = means.rows();
  if (K == 1) return {kInf, means, std::nullopt};

  const double answer_level = worst_relative(means, answer);
  for (std::size_t k = 0; k < K; ++k) {
    if (k != answer && worst_relative(means, k) <= answer_level) {
      return {0.0, push_inside(means, answer, k), std::nullopt};
    }
  }

  const Problem p{weights, means, family, answer, domain(family)};
  double best = kInf;
  AltCase best_piece;
  for (std::size_t k_star = 0; k_star < K; ++k_star) {
    if (k_star == answer) continue;
    for (std::size_t j = 0; j < d; ++j) {
      const double pair_lb =
          meet_cost(weights[answer], means(j, answer), weights[k_star], means(j, k_star), family);
      if (pair_lb >= best) continue;
      const auto row = means.row(j);
      const auto m0 = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
      std::vector<std::size_t> order{m0};
      for (std::size_t m = 0; m < K; ++m)
        if (m != m0) order.push_back(m);
      for (std::size_t m : order) {
        if (m != m0) {
          const double lb = std::max(pair_lb, meet_cost(weights[m0], means(j, m0), weights[m], means(j, m), family));
          if (lb >= best) continue;
        }
        double cost = kInf;
        const AltCase piece = solve_piece(p, AltCase{k_star, j, m, 0.0}, cost);
        if (cost < best) {
          best = cost;
          best_piece = piece;
        }
      }
    }
  }

  AltSolution out;
  out.value = best;
  out.piece = best_piece;
  out.lambda = push_inside(piece_lambda(p, best_piece), answer, best_piece.k_star);
  return out;
}

}  // namespace vecbandit
