#pragma once
#include <cstddef>
#include <vector>

#include "ocgraph/errors.hpp"

namespace ocgraph {

// Dense row-major matrix of doubles. Double precision throughout: the
// gradient checks and the percentile radius search need the headroom and the
// graphs are desk-scale.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows_init);
};

bool all_finite(const Matrix& m);

enum class Trans { N, T };

// C = alpha * op(A) * op(B) + beta * C. Delegates to CBLAS dgemm when built
// with one; otherwise a fixed-order blocked kernel. C must be pre-sized.
void gemm(Trans ta, Trans tb, double alpha, const Matrix& a, const Matrix& b, double beta,
          Matrix& c);

// Convenience: plain product A * B.
Matrix matmul_dense(const Matrix& a, const Matrix& b);

}  // namespace ocgraph
