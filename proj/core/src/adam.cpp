#include "ocgraph/adam.hpp"

#include <cmath>
#include <string>

#include "ocgraph/errors.hpp"

namespace ocgraph {

AdamState make_adam_state(const EncoderWeights& weights) {
  AdamState s;
  s.layers.resize(weights.layers.size());
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    const LayerWeights& lw = weights.layers[l];
    auto zeros = [](const Matrix& m) {
      return AdamState::Moments{Matrix(m.rows, m.cols), Matrix(m.rows, m.cols)};
    };
    s.layers[l].w = zeros(lw.w);
    s.layers[l].w_pool = zeros(lw.w_pool);
    s.layers[l].b_pool = zeros(lw.b_pool);
  }
  return s;
}

namespace {

void step_matrix(Matrix& w, const Matrix& g, AdamState::Moments& mom, const AdamState& s,
                 double lr, double bc1, double bc2) {
  if (g.rows != w.rows || g.cols != w.cols)
    throw DimensionError("gradient shape " + std::to_string(g.rows) + "x" +
                         std::to_string(g.cols) + " does not match weight shape " +
                         std::to_string(w.rows) + "x" + std::to_string(w.cols));
  for (std::size_t i = 0; i < w.data.size(); ++i) {
    const double gi = g.data[i];
    double& m = mom.m.data[i];
    double& v = mom.v.data[i];
    m = s.beta1 * m + (1.0 - s.beta1) * gi;
    v = s.beta2 * v + (1.0 - s.beta2) * gi * gi;
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    w.data[i] -= lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

}  // namespace

void adam_step(EncoderWeights& weights, const EncoderGrads& grads, AdamState& state,
               double learning_rate) {
  if (grads.layers.size() != weights.layers.size() ||
      state.layers.size() != weights.layers.size())
    throw DimensionError("optimizer state does not match the weight layout");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    LayerWeights& lw = weights.layers[l];
    const LayerWeights& lg = grads.layers[l];
    AdamState::LayerMoments& lm = state.layers[l];
    step_matrix(lw.w, lg.w, lm.w, state, learning_rate, bc1, bc2);
    if (lw.w_pool.size() > 0)
      step_matrix(lw.w_pool, lg.w_pool, lm.w_pool, state, learning_rate, bc1, bc2);
    if (lw.b_pool.size() > 0)
      step_matrix(lw.b_pool, lg.b_pool, lm.b_pool, state, learning_rate, bc1, bc2);
  }
}

}  // namespace ocgraph
