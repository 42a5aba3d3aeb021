#pragma once
#include <cstdint>
#include <memory>
#include <vector>

#include "ocgraph/csr.hpp"
#include "ocgraph/graph.hpp"
#include "ocgraph/matrix.hpp"
#include "ocgraph/rng.hpp"

namespace ocgraph {

class Tape;

namespace detail {
struct TensorNode;
struct TapeRecord;
}

// Handle to a tape-owned dense value with an optional gradient of the same
// shape. Cheap to copy; the backing storage lives until the tape and all
// handles are gone.
class Tensor {
 public:
  Tensor() = default;

  std::size_t rows() const;
  std::size_t cols() const;
  const Matrix& value() const;
  bool requires_grad() const;
  bool has_grad() const;
  const Matrix& grad() const;  // valid only when has_grad()

  bool valid() const { return node_ != nullptr; }

 private:
  friend class Tape;
  explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::TensorNode> node_;
};

// Define-by-run tape: operations execute eagerly and append a record; one
// backward() walk visits the records in exact reverse execution order,
// accumulating gradients into every requires_grad tensor that the loss
// reaches. A tape lives for one forward/backward pass and is rebuilt each
// epoch. Tapes and their tensors are confined to one thread; the internal
// row-parallelism of the kernels uses fixed chunking so results are bitwise
// reproducible for a fixed thread configuration.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves. *_ref variants alias caller-owned storage (which must outlive the
  // tape) instead of copying; constants may carry a CSR view of the same
  // matrix, letting matmul skip zeros (bag-of-words feature matrices).
  Tensor leaf(Matrix value);
  Tensor leaf_ref(const Matrix& value);
  Tensor constant(Matrix value);
  Tensor constant_ref(const Matrix& value, const CsrMatrix* sparse_view = nullptr);

  // backward: da = g * b^T, db = a^T * g
  Tensor matmul(const Tensor& a, const Tensor& b);
  // backward: dh = spmm(s, g) (s is symmetric)
  Tensor spmm(const NormalizedAdjacency& s, const Tensor& h);
  // backward masks by x > 0; subgradient 0 at the kink
  Tensor relu(const Tensor& x);
  // [x]+ of the hinge; identical kernel and subgradient convention as relu
  Tensor positive_part(const Tensor& x);
  // inverted dropout: zero with prob rate, scale survivors by 1/(1-rate);
  // identity when training is off. Mask draws are row-major from rng.
  Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng);
  // backward scatters into the selected rows; duplicate ids accumulate
  Tensor gather_rows(const Tensor& x, const std::vector<NodeId>& ids);
  // per-row squared Euclidean distance to a constant center (K x 1);
  // backward: d d_i / d z_i = 2 (z_i - c)
  Tensor sq_dist_to_center(const Tensor& z, const std::vector<double>& center);

  Tensor add(const Tensor& a, const Tensor& b);
  // x (N x F) + bias (1 x F) broadcast over rows; backward column-sums g
  Tensor add_row_broadcast(const Tensor& x, const Tensor& bias);
  Tensor scale(const Tensor& x, double alpha);
  Tensor add_scalar(const Tensor& x, double shift);
  Tensor concat_cols(const Tensor& a, const Tensor& b);
  // mean of neighbor rows per the graph adjacency (self excluded);
  // isolated nodes get zeros and propagate no gradient
  Tensor neighbor_mean(const AttributedGraph& g, const Tensor& h);
  // elementwise max over neighbor rows; backward routes to the first
  // maximizer in CSR (ascending id) order
  Tensor neighbor_max(const AttributedGraph& g, const Tensor& h);
  Tensor sum(const Tensor& x);         // 1 x 1, row-major accumulation
  Tensor sum_squares(const Tensor& x);  // 1 x 1 sum of squares

  // Seeds d loss = 1 and accumulates in reverse record order. loss must be a
  // 1 x 1 tensor of this tape; a second call without a fresh tape is an error.
  void backward(const Tensor& loss);

  std::size_t num_records() const;

 private:
  using NodePtr = std::shared_ptr<detail::TensorNode>;

  NodePtr make_node(std::shared_ptr<const Matrix> value, bool requires_grad,
                    const CsrMatrix* sparse_view = nullptr);
  const NodePtr& unwrap(const Tensor& t, const char* op) const;
  void push(std::unique_ptr<detail::TapeRecord> rec);

  std::vector<std::unique_ptr<detail::TapeRecord>> records_;
  bool backward_done_ = false;
};

}  // namespace ocgraph
