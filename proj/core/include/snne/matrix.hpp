#ifndef SNNE_MATRIX_HPP
#define SNNE_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "snne/errors.hpp"

namespace snne {

// Dense row-major matrix of 64-bit reals. Values constructed from external
// input go through `checked`, which rejects NaN/Inf; arithmetic results are
// finite by construction of their inputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  // Validating constructor for data that crossed an external boundary.
  static Matrix checked(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(double v);
  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Standard product; throws ShapeError when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

// a * b^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

}  // namespace snne

#endif  // SNNE_MATRIX_HPP
