#pragma once

#include <cstdint>
#include <vector>

#include "ocgraph/layers.hpp"
#include "ocgraph/matrix.hpp"
#include "ocgraph/tensor.hpp"

namespace ocgraph {

// The learned decision boundary: a sphere in embedding space.  The center is
// computed once from the initial embeddings of the training nodes and then
// held fixed; only the radius moves during training.
struct HypersphereState {
  std::vector<double> center;
  double radius = 0.0;
};

// Knobs of the training protocol.  Defaults match the standard recipe:
// beta 0.1, weight decay 5e-4, Adam at 1e-3, radius refresh every 10 epochs,
// up to 5000 epochs with early-stopping patience 100, dropout 0.5.
struct TrainConfig {
  double beta = 0.1;              // slack fraction: tolerated share of train nodes outside
  double weight_decay = 5e-4;     // L2 coefficient lambda (applied via the loss term)
  double learning_rate = 1e-3;
  std::size_t radius_update_interval = 10;
  std::size_t max_epochs = 5000;
  std::size_t patience = 100;
  double dropout_rate = 0.5;
  std::uint64_t seed = 1;
};

// Throws ConfigError unless beta in (0,1], weight_decay >= 0, learning_rate
// > 0, radius_update_interval >= 1, 1 <= max_epochs, patience <= max_epochs,
// dropout_rate in [0,1).
void validate_config(const TrainConfig& config);

// Column mean of the training embeddings (K x F, K >= 1).
std::vector<double> init_center(const Matrix& z_train);
inline std::vector<double> init_center(const Tensor& z_train) {
  return init_center(z_train.value());
}

// Squared distance of every row of z to the center, in row order.
std::vector<double> sq_distances(const Matrix& z, const std::vector<double>& center);

// One-class objective over the K training embeddings:
//
//   (1 / (beta*K)) * sum_i max(0, ||z_i - c||^2 - r^2)  +  r^2
//     + (weight_decay / 2) * sum of squared weight entries
//
// Built on the tape, so backward() yields gradients for the encoder weights
// (the center and radius are constants of the current epoch).
Tensor ocgnn_loss(Tape& tape, const Tensor& z_train, const HypersphereState& sphere,
                  const TrainConfig& config, const EncoderTensors& weights);

// Nearest-rank (1 - beta)-percentile of the squared train distances: the
// element at 1-based index ceil((1 - beta) * K) of the ascending order, never
// below index 1.  By construction at most beta*K of the distances exceed the
// returned value.  update_radius is its square root.
double update_radius_sq(const std::vector<double>& sq_dists, double beta);
double update_radius(const std::vector<double>& sq_dists, double beta);

// Anomaly score of one embedding: squared distance to the center minus the
// squared radius.  Positive means outside the sphere, i.e. anomalous.
double anomaly_score(const std::vector<double>& z, const HypersphereState& sphere);

// Scores for every row of an embedding matrix, in row order.
std::vector<double> anomaly_scores(const Matrix& z, const HypersphereState& sphere);

}  // namespace ocgraph
