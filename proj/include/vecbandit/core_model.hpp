#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vecbandit {

enum class Family { GaussianUnitVariance, Bernoulli };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

// Dense row-major matrix. Rows index loss dimensions, columns index arms.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t k) { return data_[i * cols_ + k]; }
  double operator()(std::size_t i, std::size_t k) const { return data_[i * cols_ + k]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::vector<double> column(std::size_t k) const;
  std::vector<std::vector<double>> to_rows() const;

  Matrix scaled(double c) const;
  // Keeps only the listed columns, in the given order.
  Matrix select_columns(std::span<const std::size_t> cols) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Raised when a Bernoulli divergence would be infinite (target mean at 0 or 1).
class InfiniteDivergence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Ground truth: a distribution family and a d x K matrix of means in [0,1].
class BanditModel {
 public:
  BanditModel(Family family, Matrix means);

  Family family() const { return family_; }
  const Matrix& means() const { return means_; }
  std::size_t arms() const { return means_.cols(); }
  std::size_t dims() const { return means_.rows(); }
  double mean(std::size_t i, std::size_t k) const { return means_(i, k); }

 private:
  Family family_;
  Matrix means_;
};

// Per-dimension losses relative to the best arm in that dimension.
struct RelativeLossMatrix {
  Matrix values;
  std::vector<std::size_t> star;  // lowest-index argmin of each row

  std::size_t arms() const { return values.cols(); }
  std::size_t dims() const { return values.rows(); }
};

// A point of the probability simplex.
class SimplexWeights {
 public:
  SimplexWeights() = default;
  // Accepts entries within 1e-9 of the simplex and renormalizes them onto it.
  explicit SimplexWeights(std::vector<double> w);

  static SimplexWeights uniform(std::size_t n);
  static SimplexWeights indicator(std::size_t n, std::size_t k);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t k) const { return w_[k]; }
  std::span<const double> values() const { return w_; }
  const std::vector<double>& vector() const { return w_; }

 private:
  std::vector<double> w_;
};

RelativeLossMatrix relative_losses(const Matrix& means);
RelativeLossMatrix relative_losses(const BanditModel& model);

// max_i w . rel.values.row(i)
double weight_relative_loss(std::span<const double> w, const RelativeLossMatrix& rel);

// Kullback-Leibler divergence between two members of the family, given by their means.
double divergence(Family family, double x, double y);
// divergence(x, y) when x > y, else 0.
double divergence_plus(Family family, double x, double y);

struct Divergence {
  Family family;

  double operator()(double x, double y) const { return divergence(family, x, y); }
  double plus(double x, double y) const { return divergence_plus(family, x, y); }
};

}  // namespace vecbandit
