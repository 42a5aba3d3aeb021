#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocgraph/graph.hpp"
#include "ocgraph/matrix.hpp"
#include "ocgraph/rng.hpp"
#include "ocgraph/tensor.hpp"

namespace ocgraph {

// Graph convolution layer kinds.  "sage" layers follow the inductive
// aggregate-then-concatenate scheme; "gcn" is the symmetric-normalized
// propagation rule.
enum class LayerKind { kGcn, kSageMean, kSagePool };

const char* layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);  // throws ConfigError

// Static description of one encoder layer.  A stack of these fully determines
// the weight shapes; the final layer of a stack must have has_activation ==
// false so embeddings are unbounded in every direction.
struct LayerSpec {
  LayerKind kind = LayerKind::kGcn;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  bool has_activation = true;
  double dropout_rate = 0.0;  // applied after the activation, training only
};

// Checks dimensions chain, positive dims, dropout in [0,1), and that exactly
// the final layer omits its activation.  Throws ConfigError on violation.
void validate_specs(const std::vector<LayerSpec>& specs);

// Parameters of a single layer.  For GCN layers only `w` (in x out) is used.
// SAGE layers transform the concatenated [self || aggregated] features, so
// `w` is (2*in x out); the pool aggregator additionally owns a per-node
// pre-transform `w_pool` (in x in) and bias `b_pool` (1 x in).
struct LayerWeights {
  Matrix w;
  Matrix w_pool;
  Matrix b_pool;
};

struct EncoderWeights {
  std::vector<LayerWeights> layers;
};

// Also used to carry per-matrix gradients, which mirror the weight shapes.
using EncoderGrads = EncoderWeights;

// Glorot-uniform initialization, U(-b, b) with b = sqrt(6 / (fan_in +
// fan_out)), drawn row-major from a dedicated RNG stream per matrix so the
// layout of one matrix never perturbs another.  Pool biases start at zero.
EncoderWeights init_weights(const std::vector<LayerSpec>& specs, std::uint64_t seed);

// Sum over all weight matrices of the squared Frobenius norm (used by the
// regularization term and by collapse diagnostics).
double squared_weight_norm(const EncoderWeights& weights);

// Tape handles for one layer's weights; produced by lift_weights so the same
// forward code serves training (leaves, gradients tracked) and inference
// (constants, recordless).
struct LayerTensors {
  Tensor w;
  Tensor w_pool;
  Tensor b_pool;
};

struct EncoderTensors {
  std::vector<LayerTensors> layers;
};

// Registers every weight matrix on the tape by reference (no copies).  The
// weight storage must stay alive and unmodified until the tape is dropped.
EncoderTensors lift_weights(Tape& tape, const EncoderWeights& weights, bool requires_grad);

// Reads gradients accumulated on lifted weight tensors back into a structure
// shaped like the weights.  Unreached matrices yield zero gradients.
EncoderGrads collect_grads(const EncoderTensors& tensors);

// One GCN layer: relu(spmm(adj, h) @ w), with relu skipped when activation is
// false.
Tensor gcn_forward(Tape& tape, const Tensor& h, const NormalizedAdjacency& adj,
                   const Tensor& w, bool activation);

enum class SageAggregator { kMean, kPool };

// One GraphSAGE layer.  Aggregates neighbor features (mean, or max over a
// relu'd linear pre-transform for pool), then applies w to the concatenated
// [self || aggregated] block.  Isolated nodes aggregate to the zero vector.
Tensor sage_forward(Tape& tape, const Tensor& h, const AttributedGraph& graph,
                    const LayerTensors& w, SageAggregator aggregator, bool activation);

// Full encoder forward pass over all nodes.  During training, dropout follows
// each activation and `rng` must be non-null if any layer has a positive
// dropout rate.  Node features enter the tape as a constant (by reference,
// with a sparse view when one is attached to the graph).
Tensor encode(Tape& tape, const AttributedGraph& graph, const NormalizedAdjacency& adj,
              const EncoderTensors& weights, const std::vector<LayerSpec>& specs,
              bool training, Rng* rng);

// Inference-only convenience: runs encode with constant weights on a private
// tape (no records) and returns the embedding matrix.
Matrix encode_inference(const AttributedGraph& graph, const NormalizedAdjacency& adj,
                        const EncoderWeights& weights, const std::vector<LayerSpec>& specs);

}  // namespace ocgraph
