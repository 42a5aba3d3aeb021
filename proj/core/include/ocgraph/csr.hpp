#pragma once
#include <cstdint>
#include <vector>

#include "ocgraph/matrix.hpp"

namespace ocgraph {

using NodeId = std::uint32_t;

// Compressed sparse rows. Column indices are sorted within each row; vals is
// empty for binary patterns (the raw adjacency) and parallel to cols
// otherwise (normalized adjacency, bag-of-words feature views).
struct CsrMatrix {
  std::size_t num_rows = 0;
  std::size_t num_cols = 0;
  std::vector<std::size_t> row_ptr;  // size num_rows + 1
  std::vector<NodeId> cols;
  std::vector<double> vals;

  std::size_t row_begin(std::size_t i) const { return row_ptr[i]; }
  std::size_t row_end(std::size_t i) const { return row_ptr[i + 1]; }
  std::size_t row_size(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
  std::size_t nnz() const { return cols.size(); }
};

// CSR view of a dense matrix (exact nonzeros). Used for constant bag-of-words
// feature matrices where skipping zeros makes the wide first-layer products
// affordable.
CsrMatrix csr_from_dense(const Matrix& m);

double density(const Matrix& m);

}  // namespace ocgraph
