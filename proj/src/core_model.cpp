#include "vecbandit/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vecbandit {

std::string to_string(Family family) {
  switch (family) {
    case Family::GaussianUnitVariance:
      return "gaussian";
    case Family::Bernoulli:
      return "bernoulli";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::GaussianUnitVariance;
  if (name == "bernoulli") return Family::Bernoulli;
  throw std::invalid_argument("unknown distribution family '" + name + "'");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * m.cols_);
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t k) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, k);
  return out;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

Matrix Matrix::scaled(double c) const {
  Matrix out = *this;
  for (double& v : out.data_) v *= c;
  return out;
}

Matrix Matrix::select_columns(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t c = 0; c < cols.size(); ++c) out(i, c) = (*this)(i, cols[c]);
  return out;
}

BanditModel::BanditModel(Family family, Matrix means) : family_(family), means_(std::move(means)) {
  if (means_.rows() == 0) throw std::invalid_argument("model needs at least one loss dimension");
  if (means_.cols() == 0) throw std::invalid_argument("model needs at least one arm");
  for (std::size_t i = 0; i < means_.rows(); ++i) {
    for (std::size_t k = 0; k < means_.cols(); ++k) {
      const double v = means_(i, k);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw std::out_of_range("mean (" + std::to_string(i + 1) + "," + std::to_string(k + 1) +
                                ") = " + std::to_string(v) + " is outside [0,1]");
      }
    }
  }
}

SimplexWeights::SimplexWeights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw std::invalid_argument("simplex weights need at least one entry");
  double sum = 0.0;
  for (double& v : w_) {
    if (!std::isfinite(v) || v < -1e-9 || v > 1.0 + 1e-9)
      throw std::invalid_argument("simplex weight outside [0,1]");
    v = std::max(v, 0.0);
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("simplex weights do not sum to 1");
  for (double& v : w_) v /= sum;
}

SimplexWeights SimplexWeights::uniform(std::size_t n) {
  return SimplexWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SimplexWeights SimplexWeights::indicator(std::size_t n, std::size_t k) {
  std::vector<double> w(n, 0.0);
  w.at(k) = 1.0;
  return SimplexWeights(std::move(w));
}

RelativeLossMatrix relative_losses(const Matrix& means) {
  RelativeLossMatrix rel{Matrix(means.rows(), means.cols()), std::vector<std::size_t>(means.rows())};
  for (std::size_t i = 0; i < means.rows(); ++i) {
    const auto row = means.row(i);
    const auto best = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
    rel.star[i] = best;
    for (std::size_t k = 0; k < means.cols(); ++k) rel.values(i, k) = row[k] - row[best];
  }
  return rel;
}

RelativeLossMatrix relative_losses(const BanditModel& model) { return relative_losses(model.means()); }

double weight_relative_loss(std::span<const double> w, const RelativeLossMatrix& rel) {
  if (w.size() != rel.arms())
    throw std::invalid_argument("weight vector length does not match the number of arms");
  double worst = 0.0;
  for (std::size_t i = 0; i < rel.dims(); ++i) {
    const auto row = rel.values.row(i);
    worst = std::max(worst, std::inner_product(row.begin(), row.end(), w.begin(), 0.0));
  }
  return worst;
}

namespace {

// x log(x / y) with the 0 log 0 = 0 convention.
double xlogxy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(x / y); }

}  // namespace

double divergence(Family family, double x, double y) {
  switch (family) {
    case Family::GaussianUnitVariance:
      return 0.5 * (x - y) * (x - y);
    case Family::Bernoulli: {
      if (x == y) return 0.0;
      if (y <= 0.0 || y >= 1.0) throw InfiniteDivergence("Bernoulli divergence to a degenerate mean");
      return std::max(0.0, xlogxy(x, y) + xlogxy(1.0 - x, 1.0 - y));
    }
  }
  return 0.0;
}

double divergence_plus(Family family, double x, double y) {
  return x > y ? divergence(family, x, y) : 0.0;
}

}  // namespace vecbandit
