#include "ocgraph/layers.hpp"

#include <cmath>
#include <numeric>

#include "ocgraph/errors.hpp"

namespace ocgraph {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kGcn: return "gcn";
    case LayerKind::kSageMean: return "sage-mean";
    case LayerKind::kSagePool: return "sage-pool";
  }
  throw std::logic_error("unknown layer kind");
}

LayerKind layer_kind_from_name(const std::string& name) {
  if (name == "gcn") return LayerKind::kGcn;
  if (name == "sage-mean") return LayerKind::kSageMean;
  if (name == "sage-pool") return LayerKind::kSagePool;
  throw ConfigError("unknown layer kind '" + name + "' (expected gcn, sage-mean, or sage-pool)");
}

void validate_specs(const std::vector<LayerSpec>& specs) {
  if (specs.empty()) throw ConfigError("encoder needs at least one layer");
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const LayerSpec& s = specs[l];
    if (s.in_dim == 0 || s.out_dim == 0)
      throw ConfigError("layer " + std::to_string(l) + " has a zero dimension");
    if (!(s.dropout_rate >= 0.0 && s.dropout_rate < 1.0))
      throw ConfigError("layer " + std::to_string(l) + " dropout rate must lie in [0, 1)");
    if (l + 1 < specs.size() && specs[l + 1].in_dim != s.out_dim)
      throw ConfigError("layer " + std::to_string(l + 1) + " input width " +
                        std::to_string(specs[l + 1].in_dim) + " does not match previous output width " +
                        std::to_string(s.out_dim));
    const bool is_last = (l + 1 == specs.size());
    if (is_last && s.has_activation)
      throw ConfigError("final layer must not have an activation");
    if (!is_last && !s.has_activation)
      throw ConfigError("only the final layer may omit its activation");
  }
}

namespace {

Matrix glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& x : m.data) x = rng.uniform(-bound, bound);
  return m;
}

// Each matrix draws from its own derived stream so that, e.g., adding a pool
// transform to layer 0 leaves the initialization of layer 1 untouched.
constexpr std::uint64_t kSlotsPerLayer = 4;

}  // namespace

EncoderWeights init_weights(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
  validate_specs(specs);
  EncoderWeights w;
  w.layers.resize(specs.size());
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const LayerSpec& s = specs[l];
    const std::uint64_t base = seed_stream::kGlorot + l * kSlotsPerLayer;
    const std::size_t self_in =
        (s.kind == LayerKind::kGcn) ? s.in_dim : 2 * s.in_dim;
    Rng rng_w(derive_seed(seed, base));
    w.layers[l].w = glorot(self_in, s.out_dim, rng_w);
    if (s.kind == LayerKind::kSagePool) {
      Rng rng_pool(derive_seed(seed, base + 1));
      w.layers[l].w_pool = glorot(s.in_dim, s.in_dim, rng_pool);
      w.layers[l].b_pool = Matrix(1, s.in_dim);  // zeros
    }
  }
  return w;
}

double squared_weight_norm(const EncoderWeights& weights) {
  double total = 0.0;
  for (const LayerWeights& lw : weights.layers) {
    for (const Matrix* m : {&lw.w, &lw.w_pool, &lw.b_pool})
      for (double x : m->data) total += x * x;
  }
  return total;
}

EncoderTensors lift_weights(Tape& tape, const EncoderWeights& weights, bool requires_grad) {
  EncoderTensors t;
  t.layers.resize(weights.layers.size());
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    const LayerWeights& lw = weights.layers[l];
    LayerTensors& lt = t.layers[l];
    auto lift = [&](const Matrix& m) {
      return requires_grad ? tape.leaf_ref(m) : tape.constant_ref(m);
    };
    lt.w = lift(lw.w);
    if (lw.w_pool.size() > 0) lt.w_pool = lift(lw.w_pool);
    if (lw.b_pool.size() > 0) lt.b_pool = lift(lw.b_pool);
  }
  return t;
}

EncoderGrads collect_grads(const EncoderTensors& tensors) {
  EncoderGrads g;
  g.layers.resize(tensors.layers.size());
  auto read = [](const Tensor& t) -> Matrix {
    if (!t.valid()) return Matrix();
    if (t.has_grad()) return t.grad();
    return Matrix(t.rows(), t.cols());  // reachable but unvisited: zero gradient
  };
  for (std::size_t l = 0; l < tensors.layers.size(); ++l) {
    g.layers[l].w = read(tensors.layers[l].w);
    g.layers[l].w_pool = read(tensors.layers[l].w_pool);
    g.layers[l].b_pool = read(tensors.layers[l].b_pool);
  }
  return g;
}

Tensor gcn_forward(Tape& tape, const Tensor& h, const NormalizedAdjacency& adj,
                   const Tensor& w, bool activation) {
  Tensor out = tape.matmul(tape.spmm(adj, h), w);
  return activation ? tape.relu(out) : out;
}

Tensor sage_forward(Tape& tape, const Tensor& h, const AttributedGraph& graph,
                    const LayerTensors& w, SageAggregator aggregator, bool activation) {
  const std::size_t in = h.cols();
  if (w.w.rows() != 2 * in)
    throw DimensionError("sage layer weight has " + std::to_string(w.w.rows()) +
                         " rows, expected " + std::to_string(2 * in));
  Tensor agg;
  if (aggregator == SageAggregator::kMean) {
    agg = tape.neighbor_mean(graph, h);
  } else {
    if (!w.w_pool.valid() || !w.b_pool.valid())
      throw ConfigError("pool aggregator requires pool transform weights");
    Tensor pre = tape.relu(tape.add_row_broadcast(tape.matmul(h, w.w_pool), w.b_pool));
    agg = tape.neighbor_max(graph, pre);
  }
  // [h || agg] @ w is evaluated as h @ w_top + agg @ w_bot (the row blocks of
  // w), which avoids materializing the concatenated N x 2*in activation and
  // lets a sparse feature block keep its fast path.
  std::vector<NodeId> top(in), bot(in);
  for (std::size_t j = 0; j < in; ++j) {
    top[j] = static_cast<NodeId>(j);
    bot[j] = static_cast<NodeId>(in + j);
  }
  Tensor out = tape.add(tape.matmul(h, tape.gather_rows(w.w, top)),
                        tape.matmul(agg, tape.gather_rows(w.w, bot)));
  return activation ? tape.relu(out) : out;
}

Tensor encode(Tape& tape, const AttributedGraph& graph, const NormalizedAdjacency& adj,
              const EncoderTensors& weights, const std::vector<LayerSpec>& specs,
              bool training, Rng* rng) {
  validate_specs(specs);
  if (weights.layers.size() != specs.size())
    throw DimensionError("encoder has " + std::to_string(weights.layers.size()) +
                         " weight sets for " + std::to_string(specs.size()) + " layers");
  if (specs.front().in_dim != graph.feature_dim())
    throw DimensionError("first layer expects width " + std::to_string(specs.front().in_dim) +
                         " but graph features have width " + std::to_string(graph.feature_dim()));
  if (training) {
    bool needs_rng = false;
    for (const LayerSpec& s : specs) needs_rng = needs_rng || s.dropout_rate > 0.0;
    if (needs_rng && rng == nullptr)
      throw ConfigError("training with dropout requires a random stream");
  }

  const CsrMatrix* view = graph.features_csr ? &*graph.features_csr : nullptr;
  Tensor h = tape.constant_ref(graph.features, view);
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const LayerSpec& s = specs[l];
    switch (s.kind) {
      case LayerKind::kGcn:
        h = gcn_forward(tape, h, adj, weights.layers[l].w, s.has_activation);
        break;
      case LayerKind::kSageMean:
        h = sage_forward(tape, h, graph, weights.layers[l], SageAggregator::kMean,
                         s.has_activation);
        break;
      case LayerKind::kSagePool:
        h = sage_forward(tape, h, graph, weights.layers[l], SageAggregator::kPool,
                         s.has_activation);
        break;
    }
    if (training && s.has_activation && s.dropout_rate > 0.0)
      h = tape.dropout(h, s.dropout_rate, /*training=*/true, *rng);
  }
  return h;
}

Matrix encode_inference(const AttributedGraph& graph, const NormalizedAdjacency& adj,
                        const EncoderWeights& weights, const std::vector<LayerSpec>& specs) {
  Tape tape;
  EncoderTensors t = lift_weights(tape, weights, /*requires_grad=*/false);
  Tensor z = encode(tape, graph, adj, t, specs, /*training=*/false, nullptr);
  return z.value();
}

}  // namespace ocgraph
