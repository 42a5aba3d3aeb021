#include "ocgraph/csr.hpp"

namespace ocgraph {

CsrMatrix csr_from_dense(const Matrix& m) {
  CsrMatrix s;
  s.num_rows = m.rows;
  s.num_cols = m.cols;
  s.row_ptr.resize(m.rows + 1, 0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m.at(i, j) != 0.0) {
        s.cols.push_back(static_cast<NodeId>(j));
        s.vals.push_back(m.at(i, j));
      }
    }
    s.row_ptr[i + 1] = s.cols.size();
  }
  return s;
}

double density(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  std::size_t nz = 0;
  for (double v : m.data)
    if (v != 0.0) ++nz;
  return static_cast<double>(nz) / static_cast<double>(m.size());
}

}  // namespace ocgraph
