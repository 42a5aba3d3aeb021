#include "ocgraph/matrix.hpp"

#include <cmath>
#include <string>

#ifdef OCGRAPH_USE_CBLAS
#include <cblas.h>
#endif

namespace ocgraph {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows_init) {
  Matrix m(rows_init.size(), rows_init.size() ? rows_init.begin()->size() : 0);
  std::size_t i = 0;
  for (const auto& r : rows_init) {
    if (r.size() != m.cols) throw DimensionError("from_rows: ragged initializer");
    std::size_t j = 0;
    for (double v : r) m.at(i, j++) = v;
    ++i;
  }
  return m;
}

bool all_finite(const Matrix& m) {
  for (double v : m.data)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {

void check_gemm_shapes(Trans ta, Trans tb, const Matrix& a, const Matrix& b, const Matrix& c) {
  std::size_t am = (ta == Trans::N) ? a.rows : a.cols;
  std::size_t ak = (ta == Trans::N) ? a.cols : a.rows;
  std::size_t bk = (tb == Trans::N) ? b.rows : b.cols;
  std::size_t bn = (tb == Trans::N) ? b.cols : b.rows;
  if (ak != bk || c.rows != am || c.cols != bn)
    throw DimensionError("gemm: shape mismatch (" + std::to_string(am) + "x" + std::to_string(ak) +
                         " * " + std::to_string(bk) + "x" + std::to_string(bn) + " -> " +
                         std::to_string(c.rows) + "x" + std::to_string(c.cols) + ")");
}

#ifndef OCGRAPH_USE_CBLAS
// Fallback kernel: i-k-j loops over an explicit copy of op(A)/op(B); the
// k-order accumulation is fixed, so results are reproducible.
Matrix materialize(Trans t, const Matrix& m) {
  if (t == Trans::N) return m;
  Matrix r(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) r.at(j, i) = m.at(i, j);
  return r;
}
#endif

}  // namespace

void gemm(Trans ta, Trans tb, double alpha, const Matrix& a, const Matrix& b, double beta,
          Matrix& c) {
  check_gemm_shapes(ta, tb, a, b, c);
#ifdef OCGRAPH_USE_CBLAS
  std::size_t m = c.rows, n = c.cols;
  std::size_t k = (ta == Trans::N) ? a.cols : a.rows;
  if (m == 0 || n == 0) return;
  if (k == 0) {
    for (double& v : c.data) v *= beta;
    return;
  }
  cblas_dgemm(CblasRowMajor, ta == Trans::N ? CblasNoTrans : CblasTrans,
              tb == Trans::N ? CblasNoTrans : CblasTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), alpha, a.data.data(),
              static_cast<int>(a.cols), b.data.data(), static_cast<int>(b.cols), beta,
              c.data.data(), static_cast<int>(c.cols));
#else
  Matrix at_m = materialize(ta, a);
  Matrix bt_m = materialize(tb, b);
  const std::size_t m = c.rows, n = c.cols, k = at_m.cols;
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c.row(i);
    if (beta == 0.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] *= beta;
    }
    const double* arow = at_m.row(i);
    for (std::size_t kk = 0; kk < k; ++kk) {
      double av = alpha * arow[kk];
      if (av == 0.0) continue;
      const double* brow = bt_m.row(kk);
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
#endif
}

Matrix matmul_dense(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  gemm(Trans::N, Trans::N, 1.0, a, b, 0.0, c);
  return c;
}

}  // namespace ocgraph
