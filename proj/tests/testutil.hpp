#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ocgraph/graph.hpp"
#include "ocgraph/matrix.hpp"
#include "ocgraph/rng.hpp"

namespace ocgraph::testutil {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                     double hi = 1.0);

// Standard normal via Box-Muller; two uniforms per draw.
double normal_draw(Rng& rng);

// Labeled two-community fixture: class 0 nodes ("normal") with features
// N(0, sigma) per coordinate, class 1 nodes shifted by shift_stds * sigma in
// every coordinate.  Ring edges inside each community plus one bridge.
AttributedGraph two_cluster_graph(std::size_t n_normal, std::size_t n_anomalous,
                                  std::size_t dim, double shift_stds, std::uint64_t seed,
                                  double sigma = 0.3);

// Erdos-Renyi-style simple graph with uniform features; labels alternate over
// two classes when with_labels is set.
AttributedGraph random_graph(std::size_t n, std::size_t dim, double edge_prob,
                             std::uint64_t seed, bool with_labels);

// Central finite differences of f() with respect to every entry of param,
// which is perturbed in place and restored.  f must recompute from scratch on
// each call (rebuild the tape) so it observes the perturbation.
Matrix fd_gradient(Matrix& param, const std::function<double()>& f, double eps = 1e-5);

double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Largest absolute deviation between the analytic and finite-difference
// gradients, relative to the largest finite-difference magnitude (floored to
// dodge 0/0 for dead-unit all-zero gradients).
double rel_gradient_err(const Matrix& analytic, const Matrix& fd);

// Writes graph.features/edges/labels as features.csv, edges.csv, labels.tsv
// under dir (created if missing); returns the three paths in that order.
struct CsvDataset {
  std::string features;
  std::string edges;
  std::string labels;
};
CsvDataset write_csv_dataset(const std::string& dir, const AttributedGraph& graph);

// Fresh directory under the system temp root, unique per call.
std::string make_temp_dir(const std::string& hint);

std::string read_file(const std::string& path);

}  // namespace ocgraph::testutil
