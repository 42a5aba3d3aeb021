#include "ocgraph/train.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "ocgraph/adam.hpp"
#include "ocgraph/errors.hpp"
#include "ocgraph/metrics.hpp"
#include "ocgraph/rng.hpp"
#include "ocgraph/tensor.hpp"

namespace ocgraph {

namespace {

// Objective over the validation normals, evaluated directly on scalars (no
// tape): same expression as the training loss with K = #validation normals.
double validation_loss(const std::vector<double>& d_all, const OneClassSplit& split,
                       const HypersphereState& sphere, const TrainConfig& config,
                       const EncoderWeights& weights) {
  const double r_sq = sphere.radius * sphere.radius;
  double hinge_sum = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < split.val_ids.size(); ++i) {
    if (split.val_labels[i] != 0) continue;
    const double excess = d_all[split.val_ids[i]] - r_sq;
    if (excess > 0.0) hinge_sum += excess;
    ++k;
  }
  double loss = hinge_sum / (config.beta * static_cast<double>(k)) + r_sq;
  if (config.weight_decay > 0.0)
    loss += (config.weight_decay / 2.0) * squared_weight_norm(weights);
  return loss;
}

double variance(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size());
}

}  // namespace

OcgnnModel train(const AttributedGraph& graph, const NormalizedAdjacency& adj,
                 const OneClassSplit& split, const std::vector<LayerSpec>& specs,
                 const TrainConfig& config) {
  validate_config(config);
  validate_specs(specs);
  validate_split(split, graph);
  if (split.train_ids.empty())
    throw ValidationError("training split is empty");
  const bool has_anomaly = std::find(split.val_labels.begin(), split.val_labels.end(),
                                     std::uint8_t{1}) != split.val_labels.end();
  const bool has_normal = std::find(split.val_labels.begin(), split.val_labels.end(),
                                    std::uint8_t{0}) != split.val_labels.end();
  if (!has_anomaly || !has_normal)
    throw UndefinedMetricError("validation set needs both classes for AUC-based early stopping");

  OcgnnModel model;
  model.specs = specs;
  model.config = config;

  EncoderWeights weights = init_weights(specs, config.seed);
  AdamState adam = make_adam_state(weights);
  Rng dropout_rng(derive_seed(config.seed, seed_stream::kDropout));

  // The center is the mean of the initial training embeddings and never moves.
  HypersphereState sphere;
  {
    Matrix z0 = encode_inference(graph, adj, weights, specs);
    Matrix z0_train(split.train_ids.size(), z0.cols);
    for (std::size_t i = 0; i < split.train_ids.size(); ++i) {
      const double* src = z0.row(split.train_ids[i]);
      std::copy(src, src + z0.cols, z0_train.row(i));
    }
    sphere.center = init_center(z0_train);
    sphere.radius = 0.0;
  }

  const std::size_t k_train = split.train_ids.size();
  EncoderWeights best_weights;
  HypersphereState best_sphere;
  double best_auc = -std::numeric_limits<double>::infinity();
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_improvement = 0;
  bool collapse_warned = false;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    // Optimization step on the training-mode graph (dropout active).
    double train_loss;
    {
      Tape tape;
      EncoderTensors wt = lift_weights(tape, weights, /*requires_grad=*/true);
      Tensor z = encode(tape, graph, adj, wt, specs, /*training=*/true, &dropout_rng);
      Tensor z_train = tape.gather_rows(z, split.train_ids);
      Tensor loss = ocgnn_loss(tape, z_train, sphere, config, wt);
      train_loss = loss.value().at(0, 0);
      if (!std::isfinite(train_loss))
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                              " (loss = " + std::to_string(train_loss) + ")");
      tape.backward(loss);
      adam_step(weights, collect_grads(wt), adam, config.learning_rate);
    }

    // Everything below sees the updated weights in inference mode.
    Matrix z_eval = encode_inference(graph, adj, weights, specs);
    if (!all_finite(z_eval))
      throw DivergenceError("embeddings diverged at epoch " + std::to_string(epoch));
    std::vector<double> d_all = sq_distances(z_eval, sphere.center);
    for (double d : d_all)
      if (!std::isfinite(d))  // finite embeddings can still overflow the square
        throw DivergenceError("embeddings diverged at epoch " + std::to_string(epoch));

    double frac_outside = -1.0;
    if (epoch % config.radius_update_interval == 0) {
      std::vector<double> d_train(k_train);
      for (std::size_t i = 0; i < k_train; ++i) d_train[i] = d_all[split.train_ids[i]];
      const double p = update_radius_sq(d_train, config.beta);
      sphere.radius = std::sqrt(p);
      std::size_t outside = 0;
      for (double d : d_train) outside += (d > p);
      frac_outside = static_cast<double>(outside) / static_cast<double>(k_train);
      if (!collapse_warned && variance(d_train) < 1e-12) {
        std::cerr << "warning: training distances have collapsed (variance < 1e-12); "
                     "the learned sphere may be degenerate\n";
        collapse_warned = true;
      }
    }

    ScoredSet val;
    val.scores.resize(split.val_ids.size());
    const double r_sq = sphere.radius * sphere.radius;
    for (std::size_t i = 0; i < split.val_ids.size(); ++i)
      val.scores[i] = d_all[split.val_ids[i]] - r_sq;
    val.labels = split.val_labels;
    const double val_auc = roc_auc(val);
    const double val_loss = validation_loss(d_all, split, sphere, config, weights);

    model.training_history.push_back(
        {epoch, train_loss, val_loss, val_auc, sphere.radius, frac_outside});

    const bool improved =
        val_auc > best_auc || (val_auc == best_auc && val_loss < best_val_loss);
    if (improved) {
      best_auc = val_auc;
      best_val_loss = val_loss;
      best_weights = weights;
      best_sphere = sphere;
      model.best_epoch = epoch;
      epochs_since_improvement = 0;
    } else if (++epochs_since_improvement > config.patience) {
      break;
    }
  }

  model.weights = std::move(best_weights);
  model.sphere = std::move(best_sphere);
  model.best_val_auc = best_auc;
  return model;
}

}  // namespace ocgraph
