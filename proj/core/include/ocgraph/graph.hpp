#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ocgraph/csr.hpp"
#include "ocgraph/matrix.hpp"

namespace ocgraph {

// An attributed graph: N nodes with D-dimensional real features, an
// undirected simple adjacency stored symmetrically in CSR (no self-loops),
// and optional per-node class labels. Node ids from the input files are
// remapped to dense 0..N-1 in file order; the originals are kept for
// reporting. Immutable after loading and safe to share across threads.
struct AttributedGraph {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;  // unique undirected edges
  Matrix features;            // N x D
  CsrMatrix adjacency;        // binary pattern, both directions present
  std::optional<std::vector<int>> labels;  // class id per node, -1 = unlabeled
  std::vector<std::string> node_ids;
  std::vector<std::string> class_names;  // index = class id

  // Set at load time when the feature matrix is sparse enough that the wide
  // first-layer products should skip zeros.
  std::optional<CsrMatrix> features_csr;

  // Load diagnostics (see LoadOptions::drop_dangling_edges).
  std::size_t dropped_edge_rows = 0;
  std::size_t self_edge_rows = 0;

  std::size_t degree(std::size_t i) const { return adjacency.row_size(i); }
  std::size_t feature_dim() const { return features.cols; }
};

// Symmetric-normalized adjacency with self-loops, precomputed once:
// entry (i,j) = 1/sqrt(deg_tilde(i) * deg_tilde(j)) for each edge of the
// self-looped graph, where deg_tilde(i) = degree(i) + 1.
struct NormalizedAdjacency {
  CsrMatrix mat;                // row i holds degree(i) + 1 entries
  std::vector<double> degrees;  // deg_tilde per node
};

struct LoadOptions {
  // The public CiteSeer edge file cites papers absent from its content file;
  // with this set such rows are skipped (counted in dropped_edge_rows)
  // instead of failing the load.
  bool drop_dangling_edges = false;
};

// Reads a graph from disk. Formats by extension: ".csv" files carry a header
// row (features: node_id + D columns; edges: src,dst; labels: node_id,class);
// anything else is the tab-separated citation format (features file rows:
// node_id, D feature values, class label; edge file rows: cited, citing).
// Edges are undirected and deduplicated regardless of how the file lists
// them; self-referencing rows are ignored. labels_path overrides labels
// embedded in the features file.
AttributedGraph load_graph(const std::string& features_path, const std::string& edges_path,
                           const std::optional<std::string>& labels_path = std::nullopt,
                           const LoadOptions& options = {});

NormalizedAdjacency normalize_adjacency(const AttributedGraph& graph);

// Maps a class name to its id; ValidationError listing known classes if absent.
int resolve_class(const AttributedGraph& graph, const std::string& name);

// Checks the structural invariants (symmetry, sorted CSR rows, no self-loops,
// finite features, label bounds); used by loaders and test builders.
void validate_graph(const AttributedGraph& graph);

// Builds a graph in memory from raw parts (tests, synthetic fixtures).
// Undirected edge list; features N x D; labels optional.
AttributedGraph make_graph(Matrix features,
                           const std::vector<std::pair<NodeId, NodeId>>& undirected_edges,
                           std::optional<std::vector<int>> labels = std::nullopt,
                           std::vector<std::string> class_names = {});

}  // namespace ocgraph
