#ifndef MLZSR_MATRIX_HPP_
#define MLZSR_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace mlzsr {

// Dense row-major matrix of 64-bit floats. All numerics in this project are
// double precision; gradient checks depend on it.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  void fill(double v) { data.assign(rows * cols, v); }

  static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c); }
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix identity(std::size_t n);

// y (+)= W x, with W of shape (out, in).
void matvec(const Matrix& w, std::span<const double> x, std::span<double> y, bool accumulate);
// y += W^T x, with W of shape (out, in) and |x| = out. Used in backprop.
void matvec_transposed(const Matrix& w, std::span<const double> x, std::span<double> y);
// W += a b^T (outer product accumulation for weight gradients).
void add_outer(Matrix& w, std::span<const double> a, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);

bool all_finite(const Matrix& m);
bool all_finite(std::span<const double> v);
// Throws NumericError when a non-finite entry is present.
void require_finite(const Matrix& m, const char* what);
void require_finite(std::span<const double> v, const char* what);

}  // namespace mlzsr

#endif  // MLZSR_MATRIX_HPP_
