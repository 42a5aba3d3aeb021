#include <doctest.h>

#include <cmath>

#include "ocgraph/errors.hpp"
#include "ocgraph/layers.hpp"
#include "testutil.hpp"

using namespace ocgraph;
using namespace ocgraph::testutil;

namespace {

std::vector<LayerSpec> two_layer(LayerKind k0, LayerKind k1, std::size_t d_in, std::size_t d_mid,
                                 std::size_t d_out, double dropout = 0.0) {
  LayerSpec a{k0, d_in, d_mid, true, dropout};
  LayerSpec b{k1, d_mid, d_out, false, 0.0};
  return {a, b};
}

}  // namespace

TEST_CASE("layer kind names round-trip") {
  for (LayerKind k : {LayerKind::kGcn, LayerKind::kSageMean, LayerKind::kSagePool})
    CHECK(layer_kind_from_name(layer_kind_name(k)) == k);
  CHECK_THROWS_AS(layer_kind_from_name("dense"), ConfigError);
}

TEST_CASE("validate_specs enforces the stack contract") {
  CHECK_NOTHROW(validate_specs(two_layer(LayerKind::kGcn, LayerKind::kGcn, 4, 3, 2)));
  CHECK_THROWS_AS(validate_specs({}), ConfigError);

  auto broken_chain = two_layer(LayerKind::kGcn, LayerKind::kGcn, 4, 3, 2);
  broken_chain[1].in_dim = 5;
  CHECK_THROWS_AS(validate_specs(broken_chain), ConfigError);

  auto zero_dim = two_layer(LayerKind::kGcn, LayerKind::kGcn, 4, 3, 2);
  zero_dim[1].out_dim = 0;
  CHECK_THROWS_AS(validate_specs(zero_dim), ConfigError);

  auto bad_rate = two_layer(LayerKind::kGcn, LayerKind::kGcn, 4, 3, 2, 1.0);
  CHECK_THROWS_AS(validate_specs(bad_rate), ConfigError);

  auto active_last = two_layer(LayerKind::kGcn, LayerKind::kGcn, 4, 3, 2);
  active_last[1].has_activation = true;
  CHECK_THROWS_AS(validate_specs(active_last), ConfigError);

  auto inactive_mid = two_layer(LayerKind::kGcn, LayerKind::kGcn, 4, 3, 2);
  inactive_mid[0].has_activation = false;
  CHECK_THROWS_AS(validate_specs(inactive_mid), ConfigError);
}

TEST_CASE("glorot initialization respects the fan bound and fills the range") {
  // 1433 -> 64: bound = sqrt(6 / 1497).
  std::vector<LayerSpec> specs{{LayerKind::kGcn, 1433, 64, false, 0.0}};
  EncoderWeights w = init_weights(specs, 123);
  REQUIRE(w.layers.size() == 1);
  const Matrix& m = w.layers[0].w;
  CHECK(m.rows == 1433);
  CHECK(m.cols == 64);
  const double bound = std::sqrt(6.0 / 1497.0);
  double lo = 0.0, hi = 0.0, mean = 0.0;
  for (double v : m.data) {
    CHECK(std::abs(v) <= bound);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    mean += v;
  }
  mean /= static_cast<double>(m.size());
  CHECK(hi > 0.9 * bound);   // the draw actually spans the interval
  CHECK(lo < -0.9 * bound);
  CHECK(std::abs(mean) < bound / 50.0);
  CHECK(squared_weight_norm(w) > 0.0);

  // Same seed reproduces; different seed does not.
  EncoderWeights w2 = init_weights(specs, 123);
  CHECK(max_abs_diff(w.layers[0].w, w2.layers[0].w) == 0.0);
  EncoderWeights w3 = init_weights(specs, 124);
  CHECK(max_abs_diff(w.layers[0].w, w3.layers[0].w) != 0.0);
}

TEST_CASE("per-matrix init streams are independent") {
  // Switching the aggregator adds w_pool draws but must not disturb w.
  std::vector<LayerSpec> mean_spec{{LayerKind::kSageMean, 5, 3, false, 0.0}};
  std::vector<LayerSpec> pool_spec{{LayerKind::kSagePool, 5, 3, false, 0.0}};
  EncoderWeights a = init_weights(mean_spec, 77);
  EncoderWeights b = init_weights(pool_spec, 77);
  CHECK(a.layers[0].w.rows == 10);  // [self || agg] input block
  CHECK(max_abs_diff(a.layers[0].w, b.layers[0].w) == 0.0);
  CHECK(b.layers[0].w_pool.rows == 5);
  CHECK(b.layers[0].w_pool.cols == 5);
  for (double v : b.layers[0].b_pool.data) CHECK(v == 0.0);  // bias starts at zero
  CHECK(a.layers[0].w_pool.size() == 0);

  // Layer 1 draws are pinned to the layer index, not to how many numbers
  // layer 0 consumed.
  auto stack_gcn = two_layer(LayerKind::kGcn, LayerKind::kGcn, 4, 3, 2);
  auto stack_pool = two_layer(LayerKind::kSagePool, LayerKind::kGcn, 4, 3, 2);
  EncoderWeights sg = init_weights(stack_gcn, 5);
  EncoderWeights sp = init_weights(stack_pool, 5);
  CHECK(max_abs_diff(sg.layers[1].w, sp.layers[1].w) == 0.0);
}

TEST_CASE("gcn layer: frozen two-node example") {
  // One edge, deg~ = 2 each, every propagation entry exactly 0.5, so the
  // aggregated features are exactly (2) for both nodes.
  AttributedGraph g = make_graph(Matrix::from_rows({{1.0}, {3.0}}), {{0, 1}});
  NormalizedAdjacency adj = normalize_adjacency(g);

  Tape t;
  Tensor h = t.constant_ref(g.features);
  Tensor w = t.constant(Matrix::from_rows({{2.0}}));
  Tensor out = gcn_forward(t, h, adj, w, /*activation=*/false);
  CHECK(out.value().at(0, 0) == 4.0);
  CHECK(out.value().at(1, 0) == 4.0);

  Tensor wneg = t.constant(Matrix::from_rows({{-2.0}}));
  Tensor relu_out = gcn_forward(t, h, adj, wneg, /*activation=*/true);
  CHECK(relu_out.value().at(0, 0) == 0.0);
  CHECK(relu_out.value().at(1, 0) == 0.0);
}

TEST_CASE("sage-mean layer: frozen star example") {
  // Node 0 joined to 1 and 2; w = [I; I] makes the output h + mean(neighbors).
  AttributedGraph g =
      make_graph(Matrix::from_rows({{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}}), {{0, 1}, {0, 2}});
  Matrix w_cat(4, 2);
  w_cat.at(0, 0) = 1.0;
  w_cat.at(1, 1) = 1.0;
  w_cat.at(2, 0) = 1.0;
  w_cat.at(3, 1) = 1.0;

  Tape t;
  LayerTensors lt;
  lt.w = t.constant_ref(w_cat);
  Tensor out =
      sage_forward(t, t.constant_ref(g.features), g, lt, SageAggregator::kMean, false);
  CHECK(out.value().at(0, 0) == 1.0);  // 0 + mean(2, 0)
  CHECK(out.value().at(0, 1) == 1.0);
  CHECK(out.value().at(1, 0) == 2.0);  // self preserved, neighbor mean (0,0)
  CHECK(out.value().at(1, 1) == 0.0);
}

TEST_CASE("sage-pool layer: frozen example with bias shift") {
  AttributedGraph g =
      make_graph(Matrix::from_rows({{0.0, 0.0}, {2.0, 0.0}, {0.0, 3.0}, {5.0, 5.0}}),
                 {{0, 1}, {0, 2}});
  Matrix w_cat(4, 2);
  w_cat.at(0, 0) = 1.0;
  w_cat.at(1, 1) = 1.0;
  w_cat.at(2, 0) = 1.0;
  w_cat.at(3, 1) = 1.0;
  Matrix w_pool = Matrix::identity(2);

  Tape t;
  LayerTensors lt;
  lt.w = t.constant_ref(w_cat);
  lt.w_pool = t.constant_ref(w_pool);

  SUBCASE("zero bias: elementwise max of the raw neighbors") {
    Matrix b_pool(1, 2);
    lt.b_pool = t.constant_ref(b_pool);
    Tensor out =
        sage_forward(t, t.constant_ref(g.features), g, lt, SageAggregator::kPool, false);
    CHECK(out.value().at(0, 0) == 2.0);  // max over relu'd neighbors (2,0), (0,3)
    CHECK(out.value().at(0, 1) == 3.0);
    CHECK(out.value().at(3, 0) == 5.0);  // isolated: aggregate is zero
    CHECK(out.value().at(3, 1) == 5.0);
  }
  SUBCASE("negative bias gates small activations to zero") {
    Matrix b_pool = Matrix::from_rows({{-2.5, -2.5}});
    lt.b_pool = t.constant_ref(b_pool);
    Tensor out =
        sage_forward(t, t.constant_ref(g.features), g, lt, SageAggregator::kPool, false);
    CHECK(out.value().at(0, 0) == 0.0);  // relu(2 - 2.5) = 0
    CHECK(out.value().at(0, 1) == 0.5);  // relu(3 - 2.5)
  }
}

TEST_CASE("encoders are permutation equivariant") {
  const std::size_t n = 12, d = 4;
  AttributedGraph g = random_graph(n, d, 0.3, 61, false);

  // Reversal permutation: node i of g becomes node n-1-i of gp.
  Matrix pf(n, d);
  std::vector<std::pair<NodeId, NodeId>> pe;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) pf.at(n - 1 - i, j) = g.features.at(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = g.adjacency.row_begin(i); k < g.adjacency.row_end(i); ++k) {
      NodeId j = g.adjacency.cols[k];
      if (j > i) pe.emplace_back(static_cast<NodeId>(n - 1 - i), static_cast<NodeId>(n - 1 - j));
    }
  AttributedGraph gp = make_graph(std::move(pf), pe);

  auto specs = two_layer(LayerKind::kGcn, LayerKind::kSageMean, d, 5, 3);
  EncoderWeights w = init_weights(specs, 8);
  Matrix z = encode_inference(g, normalize_adjacency(g), w, specs);
  Matrix zp = encode_inference(gp, normalize_adjacency(gp), w, specs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(z.at(i, j) - zp.at(n - 1 - i, j)) < 1e-12);

  auto pool_specs = two_layer(LayerKind::kSagePool, LayerKind::kSagePool, d, 5, 3);
  EncoderWeights wp = init_weights(pool_specs, 9);
  Matrix z2 = encode_inference(g, normalize_adjacency(g), wp, pool_specs);
  Matrix zp2 = encode_inference(gp, normalize_adjacency(gp), wp, pool_specs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(z2.at(i, j) - zp2.at(n - 1 - i, j)) < 1e-12);
}

TEST_CASE("a two-layer encoder only sees two hops") {
  // Chain 0-1-2-3-4-5: node 0's embedding covers nodes 0..2; perturbing node
  // 5 must leave it bitwise unchanged.
  Matrix feat(6, 2);
  Rng rng(62);
  for (double& v : feat.data) v = rng.uniform(-1.0, 1.0);
  const std::vector<std::pair<NodeId, NodeId>> chain{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};

  auto specs = two_layer(LayerKind::kGcn, LayerKind::kGcn, 2, 4, 3);
  EncoderWeights w = init_weights(specs, 10);

  AttributedGraph g1 = make_graph(Matrix(feat), chain);
  Matrix z1 = encode_inference(g1, normalize_adjacency(g1), w, specs);

  feat.at(5, 0) += 100.0;
  feat.at(5, 1) -= 3.0;
  AttributedGraph g2 = make_graph(Matrix(feat), chain);
  Matrix z2 = encode_inference(g2, normalize_adjacency(g2), w, specs);

  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(z1.at(0, j) == z2.at(0, j));  // outside the receptive field
    CHECK(z1.at(1, j) == z2.at(1, j));
  }
  CHECK(max_abs_diff(z1, z2) > 0.0);  // nodes near 5 did move
}

TEST_CASE("end-to-end weight gradients match finite differences") {
  AttributedGraph g = random_graph(9, 3, 0.4, 63, false);
  NormalizedAdjacency adj = normalize_adjacency(g);
  std::vector<double> center{0.1, -0.2};  // matches the stacks' output width

  auto check_stack = [&](std::vector<LayerSpec> specs) {
    CAPTURE(layer_kind_name(specs[0].kind));
    EncoderWeights weights = init_weights(specs, 20);
    auto loss_value = [&] {
      Tape t;
      EncoderTensors wt = lift_weights(t, weights, true);
      Tensor z = encode(t, g, adj, wt, specs, false, nullptr);
      return t.sum(t.sq_dist_to_center(z, center)).value().at(0, 0);
    };
    Tape t;
    EncoderTensors wt = lift_weights(t, weights, true);
    Tensor z = encode(t, g, adj, wt, specs, false, nullptr);
    t.backward(t.sum(t.sq_dist_to_center(z, center)));
    EncoderGrads grads = collect_grads(wt);
    for (std::size_t l = 0; l < weights.layers.size(); ++l) {
      CAPTURE(l);
      CHECK(rel_gradient_err(grads.layers[l].w, fd_gradient(weights.layers[l].w, loss_value)) <
            1e-5);
      if (weights.layers[l].w_pool.size() > 0) {
        CHECK(rel_gradient_err(grads.layers[l].w_pool,
                               fd_gradient(weights.layers[l].w_pool, loss_value)) < 1e-5);
        CHECK(rel_gradient_err(grads.layers[l].b_pool,
                               fd_gradient(weights.layers[l].b_pool, loss_value)) < 1e-5);
      }
    }
  };

  check_stack(two_layer(LayerKind::kGcn, LayerKind::kGcn, 3, 4, 2));
  check_stack(two_layer(LayerKind::kSageMean, LayerKind::kSageMean, 3, 4, 2));
  check_stack(two_layer(LayerKind::kSagePool, LayerKind::kSagePool, 3, 4, 2));
  check_stack(two_layer(LayerKind::kGcn, LayerKind::kSagePool, 3, 4, 2));
}

TEST_CASE("encode applies dropout only when training, and needs its rng") {
  AttributedGraph g = random_graph(10, 3, 0.4, 64, false);
  NormalizedAdjacency adj = normalize_adjacency(g);
  auto specs = two_layer(LayerKind::kGcn, LayerKind::kGcn, 3, 8, 2, 0.5);
  EncoderWeights w = init_weights(specs, 30);

  auto run_training = [&](std::uint64_t seed) {
    Rng rng(seed);
    Tape t;
    EncoderTensors wt = lift_weights(t, w, false);
    return Matrix(encode(t, g, adj, wt, specs, true, &rng).value());
  };
  const Matrix a = run_training(5);
  const Matrix b = run_training(5);
  CHECK(max_abs_diff(a, b) == 0.0);  // mask comes from the seed alone

  const Matrix eval = encode_inference(g, adj, w, specs);
  CHECK(max_abs_diff(a, eval) > 0.0);  // dropout actually fired

  {
    // Inference ignores dropout: same result as a training=false encode.
    Tape t;
    EncoderTensors wt = lift_weights(t, w, false);
    Tensor z = encode(t, g, adj, wt, specs, false, nullptr);
    CHECK(max_abs_diff(z.value(), eval) == 0.0);
    CHECK(t.num_records() == 0);  // constants all the way down
  }

  Tape t;
  EncoderTensors wt = lift_weights(t, w, false);
  CHECK_THROWS_AS(encode(t, g, adj, wt, specs, true, nullptr), ConfigError);
}
