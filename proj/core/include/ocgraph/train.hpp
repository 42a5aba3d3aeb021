#pragma once

#include <cstddef>
#include <vector>

#include "ocgraph/graph.hpp"
#include "ocgraph/hypersphere.hpp"
#include "ocgraph/layers.hpp"
#include "ocgraph/split.hpp"

namespace ocgraph {

// Per-epoch diagnostics.  train_frac_outside is the fraction of training
// nodes strictly outside the sphere, measured against the freshly selected
// percentile on radius-update epochs; it is negative on all other epochs.
struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_auc = 0.0;
  double radius = 0.0;
  double train_frac_outside = -1.0;
};

// A trained model: the encoder stack, the sphere, the configuration it was
// trained with, and the epoch-by-epoch history.  Weights and sphere are the
// snapshot from the best validation epoch, not the last one.
struct OcgnnModel {
  std::vector<LayerSpec> specs;
  EncoderWeights weights;
  HypersphereState sphere;
  TrainConfig config;
  std::vector<EpochRecord> training_history;
  double best_val_auc = 0.0;
  std::size_t best_epoch = 0;
};

// Trains a one-class model on the split's training nodes:
//
//   - Glorot-initialized weights; center fixed to the mean of the initial
//     training embeddings (inference mode); radius starts at zero.
//   - Per epoch: training-mode forward (dropout on), loss, backprop, one Adam
//     step, then an inference-mode forward of the updated weights for the
//     radius refresh (every radius_update_interval epochs, nearest-rank
//     percentile of the squared train distances) and validation metrics.
//   - Early stopping tracks validation AUC (ties broken by lower validation
//     loss, the objective over the validation normals); training stops once
//     the count of consecutive non-improving epochs exceeds the patience.
//
// Throws DivergenceError if the loss or the embeddings go non-finite, and a
// ValidationError subtype for structurally unusable inputs (empty training
// set, single-class validation set, width mismatches).  Warns on stderr once
// if the training distances collapse (variance below 1e-12).  Identical
// inputs and seed give a bitwise-identical model.
OcgnnModel train(const AttributedGraph& graph, const NormalizedAdjacency& adj,
                 const OneClassSplit& split, const std::vector<LayerSpec>& specs,
                 const TrainConfig& config);

}  // namespace ocgraph
