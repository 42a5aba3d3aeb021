#include "ocgraph/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ocgraph/errors.hpp"
#include "ocgraph/parallel.hpp"

namespace ocgraph {

namespace detail {

struct TensorNode {
  std::shared_ptr<const Matrix> value;
  Matrix grad;  // allocated on first contribution
  bool grad_set = false;
  bool requires_grad = false;
  const CsrMatrix* sparse = nullptr;  // optional CSR view of value (constants)
  const Tape* owner = nullptr;
};

}  // namespace detail

using detail::TensorNode;
using NodePtr = std::shared_ptr<TensorNode>;

std::size_t Tensor::rows() const { return node_->value->rows; }
std::size_t Tensor::cols() const { return node_->value->cols; }
const Matrix& Tensor::value() const { return *node_->value; }
bool Tensor::requires_grad() const { return node_->requires_grad; }
bool Tensor::has_grad() const { return node_ && node_->grad_set; }

const Matrix& Tensor::grad() const {
  if (!has_grad()) throw std::logic_error("Tensor::grad: no gradient has been accumulated");
  return node_->grad;
}

namespace {

Matrix& grad_buf(const NodePtr& n) {
  if (!n->grad_set) {
    n->grad = Matrix(n->value->rows, n->value->cols);
    n->grad_set = true;
  }
  return n->grad;
}

// out += s * x, rows in parallel, fixed accumulation order within a row.
void csr_mul_dense_add(const CsrMatrix& s, const Matrix& x, Matrix& out) {
  const std::size_t f = x.cols;
  parallel_for(s.num_rows, 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* orow = out.row(i);
      for (std::size_t k = s.row_begin(i); k < s.row_end(i); ++k) {
        const double v = s.vals[k];
        const double* xrow = x.row(s.cols[k]);
        for (std::size_t j = 0; j < f; ++j) orow[j] += v * xrow[j];
      }
    }
  });
}

// dst += s^T * g without forming s^T: serial row scatter, deterministic.
void csr_t_mul_dense_add(const CsrMatrix& s, const Matrix& g, Matrix& dst) {
  const std::size_t f = g.cols;
  for (std::size_t i = 0; i < s.num_rows; ++i) {
    const double* grow = g.row(i);
    for (std::size_t k = s.row_begin(i); k < s.row_end(i); ++k) {
      double* drow = dst.row(s.cols[k]);
      const double v = s.vals[k];
      for (std::size_t j = 0; j < f; ++j) drow[j] += v * grow[j];
    }
  }
}

constexpr NodeId kNoArg = std::numeric_limits<NodeId>::max();

}  // namespace

struct detail::TapeRecord {
  virtual ~TapeRecord() = default;
  virtual void backward() = 0;
};

namespace {

using Rec = detail::TapeRecord;

}  // namespace

// ---- record types ----------------------------------------------------------

namespace {

struct MatmulRec final : Rec {
  NodePtr a, b, out;
  void backward() override {
    if (!out->grad_set) return;
    const Matrix& g = out->grad;
    if (a->requires_grad) gemm(Trans::N, Trans::T, 1.0, g, *b->value, 1.0, grad_buf(a));
    if (b->requires_grad) {
      if (a->sparse && !a->requires_grad) {
        // db = a^T * g over the nonzeros of a only
        csr_t_mul_dense_add(*a->sparse, g, grad_buf(b));
      } else {
        gemm(Trans::T, Trans::N, 1.0, *a->value, g, 1.0, grad_buf(b));
      }
    }
  }
};

struct SpmmRec final : Rec {
  const NormalizedAdjacency* s = nullptr;
  NodePtr h, out;
  void backward() override {
    if (!out->grad_set || !h->requires_grad) return;
    // s is symmetric, so dh = s * g with the same kernel as forward
    csr_mul_dense_add(s->mat, out->grad, grad_buf(h));
  }
};

struct ReluRec final : Rec {
  NodePtr x, out;
  void backward() override {
    if (!out->grad_set || !x->requires_grad) return;
    const Matrix& g = out->grad;
    const Matrix& xv = *x->value;
    Matrix& gx = grad_buf(x);
    for (std::size_t idx = 0; idx < xv.size(); ++idx)
      if (xv.data[idx] > 0.0) gx.data[idx] += g.data[idx];
  }
};

struct DropoutRec final : Rec {
  NodePtr x, out;
  std::vector<std::uint8_t> keep;
  double inv_keep = 1.0;
  void backward() override {
    if (!out->grad_set || !x->requires_grad) return;
    const Matrix& g = out->grad;
    Matrix& gx = grad_buf(x);
    for (std::size_t idx = 0; idx < keep.size(); ++idx)
      if (keep[idx]) gx.data[idx] += g.data[idx] * inv_keep;
  }
};

struct GatherRec final : Rec {
  NodePtr x, out;
  std::vector<NodeId> ids;
  void backward() override {
    if (!out->grad_set || !x->requires_grad) return;
    const Matrix& g = out->grad;
    Matrix& gx = grad_buf(x);
    const std::size_t f = g.cols;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      double* dst = gx.row(ids[k]);
      const double* src = g.row(k);
      for (std::size_t j = 0; j < f; ++j) dst[j] += src[j];
    }
  }
};

struct SqDistRec final : Rec {
  NodePtr z, out;
  std::vector<double> center;
  void backward() override {
    if (!out->grad_set || !z->requires_grad) return;
    const Matrix& g = out->grad;
    const Matrix& zv = *z->value;
    Matrix& gz = grad_buf(z);
    for (std::size_t i = 0; i < zv.rows; ++i) {
      const double gi = g.at(i, 0);
      if (gi == 0.0) continue;
      const double* zrow = zv.row(i);
      double* grow = gz.row(i);
      for (std::size_t j = 0; j < zv.cols; ++j)
        grow[j] += gi * 2.0 * (zrow[j] - center[j]);
    }
  }
};

struct AddRec final : Rec {
  NodePtr a, b, out;
  void backward() override {
    if (!out->grad_set) return;
    const Matrix& g = out->grad;
    if (a->requires_grad) {
      Matrix& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
    }
    if (b->requires_grad) {
      Matrix& gb = grad_buf(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i];
    }
  }
};

struct AddRowBroadcastRec final : Rec {
  NodePtr x, bias, out;
  void backward() override {
    if (!out->grad_set) return;
    const Matrix& g = out->grad;
    if (x->requires_grad) {
      Matrix& gx = grad_buf(x);
      for (std::size_t i = 0; i < g.size(); ++i) gx.data[i] += g.data[i];
    }
    if (bias->requires_grad) {
      Matrix& gb = grad_buf(bias);
      for (std::size_t i = 0; i < g.rows; ++i) {
        const double* grow = g.row(i);
        for (std::size_t j = 0; j < g.cols; ++j) gb.data[j] += grow[j];
      }
    }
  }
};

struct ScaleRec final : Rec {
  NodePtr x, out;
  double alpha = 1.0;
  void backward() override {
    if (!out->grad_set || !x->requires_grad) return;
    const Matrix& g = out->grad;
    Matrix& gx = grad_buf(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx.data[i] += alpha * g.data[i];
  }
};

struct AddScalarRec final : Rec {
  NodePtr x, out;
  void backward() override {
    if (!out->grad_set || !x->requires_grad) return;
    const Matrix& g = out->grad;
    Matrix& gx = grad_buf(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx.data[i] += g.data[i];
  }
};

struct ConcatColsRec final : Rec {
  NodePtr a, b, out;
  void backward() override {
    if (!out->grad_set) return;
    const Matrix& g = out->grad;
    const std::size_t fa = a->value->cols, fb = b->value->cols;
    if (a->requires_grad) {
      Matrix& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.rows; ++i)
        for (std::size_t j = 0; j < fa; ++j) ga.at(i, j) += g.at(i, j);
    }
    if (b->requires_grad) {
      Matrix& gb = grad_buf(b);
      for (std::size_t i = 0; i < g.rows; ++i)
        for (std::size_t j = 0; j < fb; ++j) gb.at(i, j) += g.at(i, fa + j);
    }
  }
};

struct NeighborMeanRec final : Rec {
  const AttributedGraph* graph = nullptr;
  NodePtr h, out;
  void backward() override {
    if (!out->grad_set || !h->requires_grad) return;
    const Matrix& g = out->grad;
    Matrix& gh = grad_buf(h);
    const auto& adj = graph->adjacency;
    const std::size_t f = g.cols;
    for (std::size_t i = 0; i < adj.num_rows; ++i) {
      const std::size_t deg = adj.row_size(i);
      if (deg == 0) continue;
      const double inv = 1.0 / static_cast<double>(deg);
      const double* grow = g.row(i);
      for (std::size_t k = adj.row_begin(i); k < adj.row_end(i); ++k) {
        double* dst = gh.row(adj.cols[k]);
        for (std::size_t j = 0; j < f; ++j) dst[j] += inv * grow[j];
      }
    }
  }
};

struct NeighborMaxRec final : Rec {
  NodePtr h, out;
  std::vector<NodeId> argmax;  // (i, f) -> source row, kNoArg for isolated
  void backward() override {
    if (!out->grad_set || !h->requires_grad) return;
    const Matrix& g = out->grad;
    Matrix& gh = grad_buf(h);
    const std::size_t f = g.cols;
    for (std::size_t i = 0; i < g.rows; ++i) {
      const double* grow = g.row(i);
      for (std::size_t j = 0; j < f; ++j) {
        const NodeId src = argmax[i * f + j];
        if (src != kNoArg) gh.at(src, j) += grow[j];
      }
    }
  }
};

struct SumRec final : Rec {
  NodePtr x, out;
  void backward() override {
    if (!out->grad_set || !x->requires_grad) return;
    const double g = out->grad.at(0, 0);
    Matrix& gx = grad_buf(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx.data[i] += g;
  }
};

struct SumSquaresRec final : Rec {
  NodePtr x, out;
  void backward() override {
    if (!out->grad_set || !x->requires_grad) return;
    const double g = out->grad.at(0, 0);
    const Matrix& xv = *x->value;
    Matrix& gx = grad_buf(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx.data[i] += 2.0 * xv.data[i] * g;
  }
};

}  // namespace

// ---- tape ------------------------------------------------------------------

Tape::Tape() = default;
Tape::~Tape() = default;

std::size_t Tape::num_records() const { return records_.size(); }

Tape::NodePtr Tape::make_node(std::shared_ptr<const Matrix> value, bool requires_grad,
                              const CsrMatrix* sparse_view) {
  auto n = std::make_shared<TensorNode>();
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  n->sparse = sparse_view;
  n->owner = this;
  return n;
}

const Tape::NodePtr& Tape::unwrap(const Tensor& t, const char* op) const {
  if (!t.node_) throw ValidationError(std::string(op) + ": uninitialized tensor");
  if (t.node_->owner != this)
    throw ValidationError(std::string(op) + ": tensor belongs to a different tape");
  return t.node_;
}

void Tape::push(std::unique_ptr<detail::TapeRecord> rec) { records_.push_back(std::move(rec)); }

Tensor Tape::leaf(Matrix value) {
  return Tensor(make_node(std::make_shared<Matrix>(std::move(value)), true));
}

Tensor Tape::leaf_ref(const Matrix& value) {
  return Tensor(make_node(std::shared_ptr<const Matrix>(std::shared_ptr<void>(), &value), true));
}

Tensor Tape::constant(Matrix value) {
  return Tensor(make_node(std::make_shared<Matrix>(std::move(value)), false));
}

Tensor Tape::constant_ref(const Matrix& value, const CsrMatrix* sparse_view) {
  return Tensor(
      make_node(std::shared_ptr<const Matrix>(std::shared_ptr<void>(), &value), false, sparse_view));
}

Tensor Tape::matmul(const Tensor& ta, const Tensor& tb) {
  const NodePtr& a = unwrap(ta, "matmul");
  const NodePtr& b = unwrap(tb, "matmul");
  const Matrix& av = *a->value;
  const Matrix& bv = *b->value;
  if (av.cols != bv.rows)
    throw DimensionError("matmul: inner dimensions disagree (" + std::to_string(av.cols) + " vs " +
                         std::to_string(bv.rows) + ")");
  auto out_m = std::make_shared<Matrix>(av.rows, bv.cols);
  if (a->sparse && !a->requires_grad) {
    // constant sparse lhs: iterate nonzeros only
    csr_mul_dense_add(*a->sparse, bv, *out_m);
  } else {
    gemm(Trans::N, Trans::N, 1.0, av, bv, 0.0, *out_m);
  }
  const bool rg = a->requires_grad || b->requires_grad;
  NodePtr out = make_node(std::move(out_m), rg);
  if (rg) {
    auto rec = std::make_unique<MatmulRec>();
    rec->a = a;
    rec->b = b;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::spmm(const NormalizedAdjacency& s, const Tensor& th) {
  const NodePtr& h = unwrap(th, "spmm");
  const Matrix& hv = *h->value;
  if (s.mat.num_cols != hv.rows)
    throw DimensionError("spmm: adjacency is " + std::to_string(s.mat.num_rows) + "x" +
                         std::to_string(s.mat.num_cols) + " but h has " + std::to_string(hv.rows) +
                         " rows");
  auto out_m = std::make_shared<Matrix>(s.mat.num_rows, hv.cols);
  csr_mul_dense_add(s.mat, hv, *out_m);
  NodePtr out = make_node(std::move(out_m), h->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<SpmmRec>();
    rec->s = &s;
    rec->h = h;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::relu(const Tensor& tx) {
  const NodePtr& x = unwrap(tx, "relu");
  const Matrix& xv = *x->value;
  auto out_m = std::make_shared<Matrix>(xv.rows, xv.cols);
  for (std::size_t i = 0; i < xv.size(); ++i)
    out_m->data[i] = xv.data[i] > 0.0 ? xv.data[i] : 0.0;
  NodePtr out = make_node(std::move(out_m), x->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<ReluRec>();
    rec->x = x;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::positive_part(const Tensor& x) { return relu(x); }

Tensor Tape::dropout(const Tensor& tx, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  const NodePtr& x = unwrap(tx, "dropout");
  if (!training || rate == 0.0) return tx;  // identity, nothing recorded
  const Matrix& xv = *x->value;
  const double inv_keep = 1.0 / (1.0 - rate);
  std::vector<std::uint8_t> keep(xv.size());
  auto out_m = std::make_shared<Matrix>(xv.rows, xv.cols);
  for (std::size_t i = 0; i < xv.size(); ++i) {
    keep[i] = rng.uniform() >= rate ? 1 : 0;
    out_m->data[i] = keep[i] ? xv.data[i] * inv_keep : 0.0;
  }
  NodePtr out = make_node(std::move(out_m), x->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<DropoutRec>();
    rec->x = x;
    rec->out = out;
    rec->keep = std::move(keep);
    rec->inv_keep = inv_keep;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::gather_rows(const Tensor& tx, const std::vector<NodeId>& ids) {
  const NodePtr& x = unwrap(tx, "gather_rows");
  const Matrix& xv = *x->value;
  for (NodeId id : ids)
    if (id >= xv.rows)
      throw ValidationError("gather_rows: id " + std::to_string(id) + " out of range (rows=" +
                            std::to_string(xv.rows) + ")");
  auto out_m = std::make_shared<Matrix>(ids.size(), xv.cols);
  for (std::size_t k = 0; k < ids.size(); ++k)
    std::copy(xv.row(ids[k]), xv.row(ids[k]) + xv.cols, out_m->row(k));
  NodePtr out = make_node(std::move(out_m), x->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<GatherRec>();
    rec->x = x;
    rec->out = out;
    rec->ids = ids;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::sq_dist_to_center(const Tensor& tz, const std::vector<double>& center) {
  const NodePtr& z = unwrap(tz, "sq_dist_to_center");
  const Matrix& zv = *z->value;
  if (zv.cols != center.size())
    throw DimensionError("sq_dist_to_center: width " + std::to_string(zv.cols) +
                         " != center width " + std::to_string(center.size()));
  auto out_m = std::make_shared<Matrix>(zv.rows, 1);
  for (std::size_t i = 0; i < zv.rows; ++i) {
    const double* zrow = zv.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < zv.cols; ++j) {
      const double d = zrow[j] - center[j];
      acc += d * d;
    }
    out_m->at(i, 0) = acc;
  }
  NodePtr out = make_node(std::move(out_m), z->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<SqDistRec>();
    rec->z = z;
    rec->out = out;
    rec->center = center;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::add(const Tensor& ta, const Tensor& tb) {
  const NodePtr& a = unwrap(ta, "add");
  const NodePtr& b = unwrap(tb, "add");
  if (!a->value->same_shape(*b->value)) throw DimensionError("add: shape mismatch");
  const Matrix& av = *a->value;
  const Matrix& bv = *b->value;
  auto out_m = std::make_shared<Matrix>(av.rows, av.cols);
  for (std::size_t i = 0; i < av.size(); ++i) out_m->data[i] = av.data[i] + bv.data[i];
  const bool rg = a->requires_grad || b->requires_grad;
  NodePtr out = make_node(std::move(out_m), rg);
  if (rg) {
    auto rec = std::make_unique<AddRec>();
    rec->a = a;
    rec->b = b;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::add_row_broadcast(const Tensor& tx, const Tensor& tbias) {
  const NodePtr& x = unwrap(tx, "add_row_broadcast");
  const NodePtr& bias = unwrap(tbias, "add_row_broadcast");
  const Matrix& xv = *x->value;
  const Matrix& bv = *bias->value;
  if (bv.rows != 1 || bv.cols != xv.cols)
    throw DimensionError("add_row_broadcast: bias must be 1x" + std::to_string(xv.cols));
  auto out_m = std::make_shared<Matrix>(xv.rows, xv.cols);
  for (std::size_t i = 0; i < xv.rows; ++i)
    for (std::size_t j = 0; j < xv.cols; ++j) out_m->at(i, j) = xv.at(i, j) + bv.at(0, j);
  const bool rg = x->requires_grad || bias->requires_grad;
  NodePtr out = make_node(std::move(out_m), rg);
  if (rg) {
    auto rec = std::make_unique<AddRowBroadcastRec>();
    rec->x = x;
    rec->bias = bias;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::scale(const Tensor& tx, double alpha) {
  const NodePtr& x = unwrap(tx, "scale");
  const Matrix& xv = *x->value;
  auto out_m = std::make_shared<Matrix>(xv.rows, xv.cols);
  for (std::size_t i = 0; i < xv.size(); ++i) out_m->data[i] = alpha * xv.data[i];
  NodePtr out = make_node(std::move(out_m), x->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<ScaleRec>();
    rec->x = x;
    rec->out = out;
    rec->alpha = alpha;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::add_scalar(const Tensor& tx, double shift) {
  const NodePtr& x = unwrap(tx, "add_scalar");
  const Matrix& xv = *x->value;
  auto out_m = std::make_shared<Matrix>(xv.rows, xv.cols);
  for (std::size_t i = 0; i < xv.size(); ++i) out_m->data[i] = xv.data[i] + shift;
  NodePtr out = make_node(std::move(out_m), x->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<AddScalarRec>();
    rec->x = x;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::concat_cols(const Tensor& ta, const Tensor& tb) {
  const NodePtr& a = unwrap(ta, "concat_cols");
  const NodePtr& b = unwrap(tb, "concat_cols");
  const Matrix& av = *a->value;
  const Matrix& bv = *b->value;
  if (av.rows != bv.rows) throw DimensionError("concat_cols: row counts disagree");
  auto out_m = std::make_shared<Matrix>(av.rows, av.cols + bv.cols);
  for (std::size_t i = 0; i < av.rows; ++i) {
    std::copy(av.row(i), av.row(i) + av.cols, out_m->row(i));
    std::copy(bv.row(i), bv.row(i) + bv.cols, out_m->row(i) + av.cols);
  }
  const bool rg = a->requires_grad || b->requires_grad;
  NodePtr out = make_node(std::move(out_m), rg);
  if (rg) {
    auto rec = std::make_unique<ConcatColsRec>();
    rec->a = a;
    rec->b = b;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::neighbor_mean(const AttributedGraph& g, const Tensor& th) {
  const NodePtr& h = unwrap(th, "neighbor_mean");
  const Matrix& hv = *h->value;
  if (hv.rows != g.num_nodes)
    throw DimensionError("neighbor_mean: h rows != num_nodes");
  auto out_m = std::make_shared<Matrix>(hv.rows, hv.cols);
  const auto& adj = g.adjacency;
  const std::size_t f = hv.cols;
  parallel_for(g.num_nodes, 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t deg = adj.row_size(i);
      if (deg == 0) continue;  // isolated: zeros
      double* orow = out_m->row(i);
      for (std::size_t k = adj.row_begin(i); k < adj.row_end(i); ++k) {
        const double* hrow = hv.row(adj.cols[k]);
        for (std::size_t j = 0; j < f; ++j) orow[j] += hrow[j];
      }
      const double inv = 1.0 / static_cast<double>(deg);
      for (std::size_t j = 0; j < f; ++j) orow[j] *= inv;
    }
  });
  NodePtr out = make_node(std::move(out_m), h->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<NeighborMeanRec>();
    rec->graph = &g;
    rec->h = h;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::neighbor_max(const AttributedGraph& g, const Tensor& th) {
  const NodePtr& h = unwrap(th, "neighbor_max");
  const Matrix& hv = *h->value;
  if (hv.rows != g.num_nodes)
    throw DimensionError("neighbor_max: h rows != num_nodes");
  auto out_m = std::make_shared<Matrix>(hv.rows, hv.cols);
  const std::size_t f = hv.cols;
  std::vector<NodeId> argmax(hv.rows * f, kNoArg);
  const auto& adj = g.adjacency;
  parallel_for(g.num_nodes, 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (adj.row_size(i) == 0) continue;  // isolated: zeros, no argmax
      double* orow = out_m->row(i);
      NodeId* arow = argmax.data() + i * f;
      bool first = true;
      for (std::size_t k = adj.row_begin(i); k < adj.row_end(i); ++k) {
        const NodeId src = adj.cols[k];
        const double* hrow = hv.row(src);
        if (first) {
          for (std::size_t j = 0; j < f; ++j) {
            orow[j] = hrow[j];
            arow[j] = src;
          }
          first = false;
        } else {
          for (std::size_t j = 0; j < f; ++j) {
            if (hrow[j] > orow[j]) {  // strict: ties keep the first (lowest id)
              orow[j] = hrow[j];
              arow[j] = src;
            }
          }
        }
      }
    }
  });
  NodePtr out = make_node(std::move(out_m), h->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<NeighborMaxRec>();
    rec->h = h;
    rec->out = out;
    rec->argmax = std::move(argmax);
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::sum(const Tensor& tx) {
  const NodePtr& x = unwrap(tx, "sum");
  const Matrix& xv = *x->value;
  double acc = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv.data[i];
  auto out_m = std::make_shared<Matrix>(1, 1);
  out_m->at(0, 0) = acc;
  NodePtr out = make_node(std::move(out_m), x->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<SumRec>();
    rec->x = x;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

Tensor Tape::sum_squares(const Tensor& tx) {
  const NodePtr& x = unwrap(tx, "sum_squares");
  const Matrix& xv = *x->value;
  double acc = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv.data[i] * xv.data[i];
  auto out_m = std::make_shared<Matrix>(1, 1);
  out_m->at(0, 0) = acc;
  NodePtr out = make_node(std::move(out_m), x->requires_grad);
  if (out->requires_grad) {
    auto rec = std::make_unique<SumSquaresRec>();
    rec->x = x;
    rec->out = out;
    push(std::move(rec));
  }
  return Tensor(out);
}

void Tape::backward(const Tensor& loss) {
  const NodePtr& node = unwrap(loss, "backward");
  if (node->value->rows != 1 || node->value->cols != 1)
    throw DimensionError("backward: loss must be 1x1, got " + std::to_string(node->value->rows) +
                         "x" + std::to_string(node->value->cols));
  if (backward_done_)
    throw std::logic_error("backward: tape already consumed; build a fresh tape");
  backward_done_ = true;
  grad_buf(node).at(0, 0) += 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)->backward();
}

}  // namespace ocgraph
