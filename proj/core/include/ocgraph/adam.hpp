#pragma once

#include <cstddef>
#include <vector>

#include "ocgraph/layers.hpp"
#include "ocgraph/matrix.hpp"

namespace ocgraph {

// Plain Adam with bias correction (beta1 0.9, beta2 0.999, eps 1e-8).  Weight
// decay is NOT folded into the update; it reaches the gradients only through
// the explicit regularization term of the loss.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t t = 0;  // completed steps
  struct Moments {
    Matrix m;
    Matrix v;
  };
  struct LayerMoments {
    Moments w;
    Moments w_pool;
    Moments b_pool;
  };
  std::vector<LayerMoments> layers;
};

// Zero moments shaped like the given weights.
AdamState make_adam_state(const EncoderWeights& weights);

// One optimizer step over every weight matrix, in place.  Gradients must
// mirror the weight shapes (as produced by collect_grads).
void adam_step(EncoderWeights& weights, const EncoderGrads& grads, AdamState& state,
               double learning_rate);

}  // namespace ocgraph
