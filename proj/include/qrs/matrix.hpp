#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qrs {

using Vector = std::vector<double>;

// Dense column-major matrix. Rows are samples, columns are features;
// column-major keeps every per-feature sweep (norms, dots against the
// response, axpy accumulation of X*beta) contiguous for the kernels.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  // Copy of the listed columns, in the given order.
  Matrix select_cols(std::span<const std::size_t> keep) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// X * beta; zero coefficients contribute no work.
Vector matvec(const Matrix& x, std::span<const double> beta);

// X^T * v, one kernel dot per column.
Vector tmatvec(const Matrix& x, std::span<const double> v);

// Power-iteration estimate of the largest squared singular value of X.
// Deterministic (fixed internal start vector).
double spectral_norm_sq(const Matrix& x, int iters = 50);

}  // namespace qrs
