#include "mlzsr/matrix.hpp"

#include <cmath>
#include <string>

#include "mlzsr/errors.hpp"

namespace mlzsr {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul: " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                     " * " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.data.data() + i * a.cols;
    double* orow = out.data.data() + i * out.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) {
        orow[j] += aik * brow[j];
      }
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      out(j, i) = m(i, j);
    }
  }
  return out;
}

Matrix identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

void matvec(const Matrix& w, std::span<const double> x, std::span<double> y, bool accumulate) {
  if (w.cols != x.size() || w.rows != y.size()) {
    throw ShapeError("matvec: shape mismatch");
  }
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* row = w.data.data() + i * w.cols;
    double acc = accumulate ? y[i] : 0.0;
    for (std::size_t j = 0; j < w.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_transposed(const Matrix& w, std::span<const double> x, std::span<double> y) {
  if (w.rows != x.size() || w.cols != y.size()) {
    throw ShapeError("matvec_transposed: shape mismatch");
  }
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = w.data.data() + i * w.cols;
    for (std::size_t j = 0; j < w.cols; ++j) y[j] += row[j] * xi;
  }
}

void add_outer(Matrix& w, std::span<const double> a, std::span<const double> b) {
  if (w.rows != a.size() || w.cols != b.size()) {
    throw ShapeError("add_outer: shape mismatch");
  }
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* row = w.data.data() + i * w.cols;
    for (std::size_t j = 0; j < w.cols; ++j) row[j] += ai * b[j];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

bool all_finite(const Matrix& m) { return all_finite(std::span<const double>(m.data)); }

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) throw NumericError(std::string(what) + ": non-finite value");
}

void require_finite(std::span<const double> v, const char* what) {
  if (!all_finite(v)) throw NumericError(std::string(what) + ": non-finite value");
}

}  // namespace mlzsr
