#include "ocgraph/hypersphere.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ocgraph/errors.hpp"

namespace ocgraph {

void validate_config(const TrainConfig& config) {
  if (!(config.beta > 0.0 && config.beta <= 1.0))
    throw ConfigError("beta must lie in (0, 1]");
  if (!(config.weight_decay >= 0.0))
    throw ConfigError("weight decay must be non-negative");
  if (!(config.learning_rate > 0.0))
    throw ConfigError("learning rate must be positive");
  if (config.radius_update_interval < 1)
    throw ConfigError("radius update interval must be at least 1");
  if (config.max_epochs < 1)
    throw ConfigError("max epochs must be at least 1");
  if (config.patience > config.max_epochs)
    throw ConfigError("patience must not exceed max epochs");
  if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0))
    throw ConfigError("dropout rate must lie in [0, 1)");
}

std::vector<double> init_center(const Matrix& z_train) {
  if (z_train.rows == 0) throw ValidationError("cannot center an empty embedding set");
  std::vector<double> c(z_train.cols, 0.0);
  for (std::size_t i = 0; i < z_train.rows; ++i) {
    const double* row = z_train.row(i);
    for (std::size_t j = 0; j < z_train.cols; ++j) c[j] += row[j];
  }
  const double inv = 1.0 / static_cast<double>(z_train.rows);
  for (double& x : c) x *= inv;
  return c;
}

namespace {

double row_sq_dist(const double* row, const std::vector<double>& center) {
  double d = 0.0;
  for (std::size_t j = 0; j < center.size(); ++j) {
    const double diff = row[j] - center[j];
    d += diff * diff;
  }
  return d;
}

}  // namespace

std::vector<double> sq_distances(const Matrix& z, const std::vector<double>& center) {
  if (z.cols != center.size())
    throw DimensionError("embedding width " + std::to_string(z.cols) +
                         " does not match center width " + std::to_string(center.size()));
  std::vector<double> d(z.rows);
  for (std::size_t i = 0; i < z.rows; ++i) d[i] = row_sq_dist(z.row(i), center);
  return d;
}

Tensor ocgnn_loss(Tape& tape, const Tensor& z_train, const HypersphereState& sphere,
                  const TrainConfig& config, const EncoderTensors& weights) {
  if (z_train.rows() == 0) throw ValidationError("loss needs at least one training embedding");
  const double k = static_cast<double>(z_train.rows());
  const double r_sq = sphere.radius * sphere.radius;

  Tensor d = tape.sq_dist_to_center(z_train, sphere.center);
  Tensor hinge = tape.positive_part(tape.add_scalar(d, -r_sq));
  Tensor loss = tape.add_scalar(tape.scale(tape.sum(hinge), 1.0 / (config.beta * k)), r_sq);

  if (config.weight_decay > 0.0) {
    Tensor reg;
    for (const LayerTensors& lt : weights.layers) {
      for (const Tensor* t : {&lt.w, &lt.w_pool, &lt.b_pool}) {
        if (!t->valid()) continue;
        Tensor term = tape.sum_squares(*t);
        reg = reg.valid() ? tape.add(reg, term) : term;
      }
    }
    if (reg.valid()) loss = tape.add(loss, tape.scale(reg, config.weight_decay / 2.0));
  }
  return loss;
}

double update_radius_sq(const std::vector<double>& sq_dists, double beta) {
  if (sq_dists.empty()) throw ValidationError("radius update needs at least one distance");
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
  const std::size_t k = sq_dists.size();
  double pos = std::ceil((1.0 - beta) * static_cast<double>(k));
  if (pos < 1.0) pos = 1.0;
  std::size_t idx = static_cast<std::size_t>(pos);
  if (idx > k) idx = k;
  std::vector<double> work(sq_dists);
  std::nth_element(work.begin(), work.begin() + (idx - 1), work.end());
  return work[idx - 1];
}

double update_radius(const std::vector<double>& sq_dists, double beta) {
  return std::sqrt(update_radius_sq(sq_dists, beta));
}

double anomaly_score(const std::vector<double>& z, const HypersphereState& sphere) {
  if (z.size() != sphere.center.size())
    throw DimensionError("embedding width " + std::to_string(z.size()) +
                         " does not match center width " + std::to_string(sphere.center.size()));
  return row_sq_dist(z.data(), sphere.center) - sphere.radius * sphere.radius;
}

std::vector<double> anomaly_scores(const Matrix& z, const HypersphereState& sphere) {
  std::vector<double> d = sq_distances(z, sphere.center);
  const double r_sq = sphere.radius * sphere.radius;
  for (double& x : d) x -= r_sq;
  return d;
}

}  // namespace ocgraph
