#include "testutil.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ocgraph::testutil {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo, double hi) {
  Matrix m(rows, cols);
  for (double& x : m.data) x = rng.uniform(lo, hi);
  return m;
}

double normal_draw(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]: keeps the log finite
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

void ring_edges(std::vector<std::pair<NodeId, NodeId>>& edges, std::size_t first,
                std::size_t count) {
  if (count == 2) {
    edges.emplace_back(static_cast<NodeId>(first), static_cast<NodeId>(first + 1));
  } else if (count >= 3) {
    for (std::size_t i = 0; i < count; ++i)
      edges.emplace_back(static_cast<NodeId>(first + i),
                         static_cast<NodeId>(first + (i + 1) % count));
  }
}

}  // namespace

AttributedGraph two_cluster_graph(std::size_t n_normal, std::size_t n_anomalous,
                                  std::size_t dim, double shift_stds, std::uint64_t seed,
                                  double sigma) {
  const std::size_t n = n_normal + n_anomalous;
  Rng rng(seed);
  Matrix x(n, dim);
  std::vector<int> labels(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool anomalous = i >= n_normal;
    labels[i] = anomalous ? 1 : 0;
    const double offset = anomalous ? shift_stds * sigma : 0.0;
    for (std::size_t j = 0; j < dim; ++j) x.at(i, j) = offset + sigma * normal_draw(rng);
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  ring_edges(edges, 0, n_normal);
  ring_edges(edges, n_normal, n_anomalous);
  if (n_normal > 0 && n_anomalous > 0)
    edges.emplace_back(static_cast<NodeId>(0), static_cast<NodeId>(n_normal));
  return make_graph(std::move(x), edges, std::move(labels), {"normal", "anomaly"});
}

AttributedGraph random_graph(std::size_t n, std::size_t dim, double edge_prob,
                             std::uint64_t seed, bool with_labels) {
  Rng rng(seed);
  Matrix x = random_matrix(n, dim, rng);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < edge_prob)
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  std::optional<std::vector<int>> labels;
  std::vector<std::string> class_names;
  if (with_labels) {
    labels.emplace(n);
    for (std::size_t i = 0; i < n; ++i) (*labels)[i] = static_cast<int>(i % 2);
    class_names = {"even", "odd"};
  }
  return make_graph(std::move(x), edges, std::move(labels), std::move(class_names));
}

Matrix fd_gradient(Matrix& param, const std::function<double()>& f, double eps) {
  Matrix g(param.rows, param.cols);
  for (std::size_t i = 0; i < param.data.size(); ++i) {
    const double orig = param.data[i];
    param.data[i] = orig + eps;
    const double fp = f();
    param.data[i] = orig - eps;
    const double fm = f();
    param.data[i] = orig;
    g.data[i] = (fp - fm) / (2.0 * eps);
  }
  return g;
}

double max_abs(const Matrix& m) {
  double v = 0.0;
  for (double x : m.data) v = std::max(v, std::abs(x));
  return v;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::logic_error("shape mismatch in max_abs_diff");
  double v = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    v = std::max(v, std::abs(a.data[i] - b.data[i]));
  return v;
}

double rel_gradient_err(const Matrix& analytic, const Matrix& fd) {
  return max_abs_diff(analytic, fd) / std::max(max_abs(fd), 1e-8);
}

CsvDataset write_csv_dataset(const std::string& dir, const AttributedGraph& graph) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  CsvDataset paths{dir + "/features.csv", dir + "/edges.csv", dir + "/labels.tsv"};

  std::ofstream feat(paths.features);
  feat << "node_id";
  for (std::size_t j = 0; j < graph.feature_dim(); ++j) feat << ",f" << j;
  feat << "\n";
  for (std::size_t i = 0; i < graph.num_nodes; ++i) {
    feat << graph.node_ids[i];
    for (std::size_t j = 0; j < graph.feature_dim(); ++j)
      feat << "," << nlohmann::json(graph.features.at(i, j)).dump();
    feat << "\n";
  }

  std::ofstream edges(paths.edges);
  edges << "src,dst\n";
  for (std::size_t i = 0; i < graph.num_nodes; ++i)
    for (std::size_t k = graph.adjacency.row_begin(i); k < graph.adjacency.row_end(i); ++k) {
      const NodeId j = graph.adjacency.cols[k];
      if (j > i) edges << graph.node_ids[i] << "," << graph.node_ids[j] << "\n";
    }

  std::ofstream labels(paths.labels);
  if (graph.labels)
    for (std::size_t i = 0; i < graph.num_nodes; ++i)
      if ((*graph.labels)[i] >= 0)
        labels << graph.node_ids[i] << "\t" << graph.class_names[(*graph.labels)[i]] << "\n";

  if (!feat || !edges || !labels) throw std::runtime_error("failed writing dataset to " + dir);
  return paths;
}

std::string make_temp_dir(const std::string& hint) {
  static std::atomic<unsigned> counter{0};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("ocgraph-test-" + std::to_string(::getpid()) + "-" + hint + "-" +
                        std::to_string(counter++));
  fs::create_directories(dir);
  return dir.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace ocgraph::testutil
