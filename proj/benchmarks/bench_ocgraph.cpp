// Microbenchmarks for the kernels that dominate training time: dense and
// sparse matrix products, the encoder forward pass, whole training epochs,
// the radius percentile, and AUC scoring.  Run with --benchmark_filter=...
// to narrow; OCGRAPH_THREADS caps internal parallelism as in the CLI.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "ocgraph/csr.hpp"
#include "ocgraph/graph.hpp"
#include "ocgraph/hypersphere.hpp"
#include "ocgraph/layers.hpp"
#include "ocgraph/matrix.hpp"
#include "ocgraph/metrics.hpp"
#include "ocgraph/rng.hpp"
#include "ocgraph/split.hpp"
#include "ocgraph/tensor.hpp"
#include "ocgraph/train.hpp"

namespace {

using namespace ocgraph;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& x : m.data) x = rng.uniform(-1.0, 1.0);
  return m;
}

// Erdos-Renyi-style graph with uniform features and alternating labels.
AttributedGraph bench_graph(std::size_t n, std::size_t dim, double edge_prob,
                            std::uint64_t seed) {
  Rng rng(seed);
  Matrix x = random_matrix(n, dim, seed + 1);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < edge_prob)
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 3 == 0);
  return make_graph(std::move(x), edges, std::move(labels), {"normal", "anomaly"});
}

void BM_matmul_dense(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    Matrix c = matmul_dense(a, b);
    benchmark::DoNotOptimize(c.data.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n * n * n);
}
BENCHMARK(BM_matmul_dense)->Arg(128)->Arg(256)->Arg(512);

void BM_spmm_forward(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const AttributedGraph g = bench_graph(n, 8, 10.0 / static_cast<double>(n), 3);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const Matrix h = random_matrix(n, 64, 4);
  for (auto _ : state) {
    Tape t;
    Tensor out = t.spmm(adj, t.constant_ref(h));
    benchmark::DoNotOptimize(out.value().data.data());
  }
}
BENCHMARK(BM_spmm_forward)->Arg(1000)->Arg(4000);

void BM_sparse_feature_matmul(benchmark::State& state) {
  // Bag-of-words shape: 0/1 features at roughly Cora-like density.
  Rng rng(5);
  Matrix x(2000, 1433);
  for (double& v : x.data)
    if (rng.uniform() < 0.0127) v = 1.0;
  const CsrMatrix view = csr_from_dense(x);
  const Matrix w = random_matrix(1433, 64, 6);
  for (auto _ : state) {
    Tape t;
    Tensor out = t.matmul(t.constant_ref(x, &view), t.constant_ref(w));
    benchmark::DoNotOptimize(out.value().data.data());
  }
}
BENCHMARK(BM_sparse_feature_matmul);

void BM_encode_inference(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const AttributedGraph g = bench_graph(n, 32, 10.0 / static_cast<double>(n), 7);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  std::vector<LayerSpec> specs(2);
  specs[0] = {LayerKind::kGcn, 32, 64, true, 0.0};
  specs[1] = {LayerKind::kGcn, 64, 32, false, 0.0};
  const EncoderWeights weights = init_weights(specs, 8);
  for (auto _ : state) {
    Matrix z = encode_inference(g, adj, weights, specs);
    benchmark::DoNotOptimize(z.data.data());
  }
}
BENCHMARK(BM_encode_inference)->Arg(1000)->Arg(4000);

void BM_train_five_epochs(benchmark::State& state) {
  const AttributedGraph g = bench_graph(300, 16, 0.03, 9);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const OneClassSplit split = make_one_class_split(g, 0, SplitRatios{}, 2);
  std::vector<LayerSpec> specs(2);
  specs[0] = {LayerKind::kGcn, 16, 32, true, 0.5};
  specs[1] = {LayerKind::kGcn, 32, 16, false, 0.0};
  TrainConfig cfg;
  cfg.max_epochs = 5;
  cfg.patience = 5;
  for (auto _ : state) {
    OcgnnModel m = train(g, adj, split, specs, cfg);
    benchmark::DoNotOptimize(m.sphere.radius);
  }
}
BENCHMARK(BM_train_five_epochs)->Unit(benchmark::kMillisecond);

void BM_update_radius(benchmark::State& state) {
  Rng rng(10);
  std::vector<double> d(10000);
  for (double& x : d) x = rng.uniform(0.0, 10.0);
  for (auto _ : state) {
    double r = update_radius_sq(d, 0.1);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_update_radius);

void BM_roc_auc(benchmark::State& state) {
  Rng rng(11);
  ScoredSet s;
  s.scores.resize(10000);
  s.labels.resize(10000);
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    s.labels[i] = rng.uniform() < 0.3 ? 1 : 0;
    s.scores[i] = rng.uniform(-1.0, 1.0) + (s.labels[i] ? 0.5 : 0.0);
  }
  s.labels[0] = 0;
  s.labels[1] = 1;
  for (auto _ : state) {
    double auc = roc_auc(s);
    benchmark::DoNotOptimize(auc);
  }
}
BENCHMARK(BM_roc_auc);

}  // namespace

BENCHMARK_MAIN();
