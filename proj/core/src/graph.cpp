#include "ocgraph/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "ocgraph/errors.hpp"

namespace ocgraph {

namespace {

constexpr double kSparseFeatureThreshold = 0.25;

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view tok, const std::string& path, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError(path, line, "expected a number, got '" + std::string(tok) + "'");
  return v;
}

struct RawLine {
  std::string text;
  std::size_t number;  // 1-based
};

// Reads non-empty lines, stripping trailing CR from CRLF files.
std::vector<RawLine> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::vector<RawLine> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back({std::move(line), number});
    line.clear();
  }
  return lines;
}

bool is_csv(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

struct NodeTable {
  std::vector<std::string> ids;
  std::unordered_map<std::string, NodeId> index;

  NodeId add(const std::string& id, const std::string& path, std::size_t line) {
    auto [it, inserted] = index.emplace(id, static_cast<NodeId>(ids.size()));
    if (!inserted) throw ParseError(path, line, "duplicate node id '" + id + "'");
    ids.push_back(id);
    return it->second;
  }
};

struct LabelTable {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> index;

  int intern(std::string_view name) {
    auto it = index.find(std::string(name));
    if (it != index.end()) return it->second;
    int id = static_cast<int>(names.size());
    names.emplace_back(name);
    index.emplace(names.back(), id);
    return id;
  }
};

void parse_features(const std::string& path, NodeTable& nodes, Matrix& features,
                    std::vector<int>& labels, LabelTable& classes, bool& has_labels) {
  auto lines = read_lines(path);
  const bool csv = is_csv(path);
  const char delim = csv ? ',' : '\t';
  std::size_t first = 0;
  if (csv) first = 1;  // header row
  if (lines.size() <= first) throw ValidationError(path + ": no data rows");

  std::vector<std::vector<double>> rows;
  std::size_t dim = 0;
  for (std::size_t k = first; k < lines.size(); ++k) {
    const auto& rl = lines[k];
    auto fields = split_fields(rl.text, delim);
    // TSV rows carry a trailing class label; CSV rows are node_id + features.
    const std::size_t min_fields = csv ? 2 : 3;
    if (fields.size() < min_fields)
      throw ParseError(path, rl.number, "expected at least " + std::to_string(min_fields) +
                                            " fields, got " + std::to_string(fields.size()));
    const std::size_t d = fields.size() - (csv ? 1 : 2);
    if (dim == 0)
      dim = d;
    else if (d != dim)
      throw ParseError(path, rl.number, "expected " + std::to_string(dim) + " feature values, got " +
                                            std::to_string(d));
    nodes.add(std::string(fields[0]), path, rl.number);
    std::vector<double> row(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      row[j] = parse_double(fields[1 + j], path, rl.number);
      if (!std::isfinite(row[j]))
        throw ParseError(path, rl.number, "non-finite feature value");
    }
    rows.push_back(std::move(row));
    if (!csv) {
      labels.push_back(classes.intern(fields.back()));
      has_labels = true;
    }
  }
  features = Matrix(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), features.row(i));
}

void parse_labels(const std::string& path, const NodeTable& nodes, std::vector<int>& labels,
                  LabelTable& classes) {
  auto lines = read_lines(path);
  const bool csv = is_csv(path);
  const char delim = csv ? ',' : '\t';
  std::size_t first = csv ? 1 : 0;
  labels.assign(nodes.ids.size(), -1);
  for (std::size_t k = first; k < lines.size(); ++k) {
    const auto& rl = lines[k];
    auto fields = split_fields(rl.text, delim);
    if (fields.size() != 2)
      throw ParseError(path, rl.number, "expected 2 fields (node_id, class)");
    auto it = nodes.index.find(std::string(fields[0]));
    if (it == nodes.index.end())
      throw ParseError(path, rl.number, "unknown node id '" + std::string(fields[0]) + "'");
    labels[it->second] = classes.intern(fields[1]);
  }
}

struct EdgeList {
  std::vector<std::pair<NodeId, NodeId>> pairs;  // stored (min, max)
  std::size_t dropped = 0;
  std::size_t self_rows = 0;
};

EdgeList parse_edges(const std::string& path, const NodeTable& nodes, bool drop_dangling) {
  auto lines = read_lines(path);
  const bool csv = is_csv(path);
  const char delim = csv ? ',' : '\t';
  std::size_t first = csv ? 1 : 0;
  EdgeList edges;
  for (std::size_t k = first; k < lines.size(); ++k) {
    const auto& rl = lines[k];
    auto fields = split_fields(rl.text, delim);
    if (fields.size() != 2)
      throw ParseError(path, rl.number, "expected 2 fields (src, dst)");
    auto a = nodes.index.find(std::string(fields[0]));
    auto b = nodes.index.find(std::string(fields[1]));
    if (a == nodes.index.end() || b == nodes.index.end()) {
      if (drop_dangling) {
        ++edges.dropped;
        continue;
      }
      const auto& tok = (a == nodes.index.end()) ? fields[0] : fields[1];
      throw ParseError(path, rl.number,
                       "edge references undeclared node id '" + std::string(tok) + "'");
    }
    if (a->second == b->second) {
      ++edges.self_rows;  // self-citation; not an edge of a simple graph
      continue;
    }
    edges.pairs.emplace_back(std::min(a->second, b->second), std::max(a->second, b->second));
  }
  std::sort(edges.pairs.begin(), edges.pairs.end());
  edges.pairs.erase(std::unique(edges.pairs.begin(), edges.pairs.end()), edges.pairs.end());
  return edges;
}

CsrMatrix build_symmetric_csr(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  CsrMatrix adj;
  adj.num_rows = n;
  adj.num_cols = n;
  adj.row_ptr.assign(n + 1, 0);
  for (const auto& [a, b] : pairs) {
    ++adj.row_ptr[a + 1];
    ++adj.row_ptr[b + 1];
  }
  for (std::size_t i = 0; i < n; ++i) adj.row_ptr[i + 1] += adj.row_ptr[i];
  adj.cols.resize(pairs.size() * 2);
  std::vector<std::size_t> cursor(adj.row_ptr.begin(), adj.row_ptr.end() - 1);
  // pairs are sorted by (min, max), so filling in order keeps every CSR row
  // sorted: row a receives ascending b's, and row b ascending a's.
  for (const auto& [a, b] : pairs) adj.cols[cursor[a]++] = b;
  for (const auto& [a, b] : pairs) adj.cols[cursor[b]++] = a;
  for (std::size_t i = 0; i < n; ++i)
    std::sort(adj.cols.begin() + static_cast<std::ptrdiff_t>(adj.row_ptr[i]),
              adj.cols.begin() + static_cast<std::ptrdiff_t>(adj.row_ptr[i + 1]));
  return adj;
}

void attach_feature_csr(AttributedGraph& g) {
  if (density(g.features) < kSparseFeatureThreshold) g.features_csr = csr_from_dense(g.features);
}

}  // namespace

AttributedGraph load_graph(const std::string& features_path, const std::string& edges_path,
                           const std::optional<std::string>& labels_path,
                           const LoadOptions& options) {
  AttributedGraph g;
  NodeTable nodes;
  LabelTable classes;
  std::vector<int> labels;
  bool has_labels = false;
  parse_features(features_path, nodes, g.features, labels, classes, has_labels);
  if (labels_path) {
    classes = LabelTable{};
    parse_labels(*labels_path, nodes, labels, classes);
    has_labels = true;
  }
  auto edges = parse_edges(edges_path, nodes, options.drop_dangling_edges);
  g.num_nodes = nodes.ids.size();
  g.num_edges = edges.pairs.size();
  g.adjacency = build_symmetric_csr(g.num_nodes, edges.pairs);
  g.node_ids = std::move(nodes.ids);
  if (has_labels) {
    g.labels = std::move(labels);
    g.class_names = std::move(classes.names);
  }
  g.dropped_edge_rows = edges.dropped;
  g.self_edge_rows = edges.self_rows;
  attach_feature_csr(g);
  validate_graph(g);
  return g;
}

AttributedGraph make_graph(Matrix features,
                           const std::vector<std::pair<NodeId, NodeId>>& undirected_edges,
                           std::optional<std::vector<int>> labels,
                           std::vector<std::string> class_names) {
  AttributedGraph g;
  g.num_nodes = features.rows;
  g.features = std::move(features);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(undirected_edges.size());
  for (const auto& [a, b] : undirected_edges) {
    if (a >= g.num_nodes || b >= g.num_nodes)
      throw ValidationError("make_graph: edge endpoint out of range");
    if (a == b) continue;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  g.num_edges = pairs.size();
  g.adjacency = build_symmetric_csr(g.num_nodes, pairs);
  g.node_ids.reserve(g.num_nodes);
  for (std::size_t i = 0; i < g.num_nodes; ++i) g.node_ids.push_back(std::to_string(i));
  if (labels) {
    int max_label = -1;
    for (int l : *labels) max_label = std::max(max_label, l);
    if (class_names.empty())
      for (int c = 0; c <= max_label; ++c) class_names.push_back(std::to_string(c));
    g.labels = std::move(*labels);
    g.class_names = std::move(class_names);
  }
  attach_feature_csr(g);
  validate_graph(g);
  return g;
}

void validate_graph(const AttributedGraph& g) {
  if (g.features.rows != g.num_nodes)
    throw ValidationError("graph: feature row count != num_nodes");
  if (!all_finite(g.features)) throw ValidationError("graph: non-finite feature value");
  const auto& a = g.adjacency;
  if (a.num_rows != g.num_nodes || a.num_cols != g.num_nodes || a.row_ptr.size() != g.num_nodes + 1)
    throw ValidationError("graph: adjacency shape mismatch");
  if (a.nnz() != 2 * g.num_edges) throw ValidationError("graph: edge count mismatch");
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      NodeId j = a.cols[k];
      if (j >= g.num_nodes) throw ValidationError("graph: adjacency column out of range");
      if (j == i) throw ValidationError("graph: self-loop in adjacency");
      if (k > a.row_begin(i) && a.cols[k - 1] >= j)
        throw ValidationError("graph: adjacency row not strictly sorted");
      // symmetry: find i in row j
      auto begin = a.cols.begin() + static_cast<std::ptrdiff_t>(a.row_begin(j));
      auto end = a.cols.begin() + static_cast<std::ptrdiff_t>(a.row_end(j));
      if (!std::binary_search(begin, end, static_cast<NodeId>(i)))
        throw ValidationError("graph: adjacency not symmetric");
    }
  }
  if (g.labels) {
    if (g.labels->size() != g.num_nodes) throw ValidationError("graph: label count != num_nodes");
    for (int l : *g.labels)
      if (l < -1 || l >= static_cast<int>(g.class_names.size()))
        throw ValidationError("graph: label id out of range");
  }
}

NormalizedAdjacency normalize_adjacency(const AttributedGraph& graph) {
  const std::size_t n = graph.num_nodes;
  NormalizedAdjacency norm;
  norm.degrees.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    norm.degrees[i] = static_cast<double>(graph.degree(i) + 1);  // self-loop added

  CsrMatrix& m = norm.mat;
  m.num_rows = n;
  m.num_cols = n;
  m.row_ptr.resize(n + 1);
  m.row_ptr[0] = 0;
  for (std::size_t i = 0; i < n; ++i)
    m.row_ptr[i + 1] = m.row_ptr[i] + graph.degree(i) + 1;
  m.cols.resize(m.row_ptr[n]);
  m.vals.resize(m.row_ptr[n]);

  const auto& adj = graph.adjacency;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = norm.degrees[i];
    std::size_t out = m.row_begin(i);
    bool self_placed = false;
    for (std::size_t k = adj.row_begin(i); k < adj.row_end(i); ++k) {
      NodeId j = adj.cols[k];
      if (!self_placed && j > i) {
        m.cols[out] = static_cast<NodeId>(i);
        m.vals[out] = 1.0 / di;
        ++out;
        self_placed = true;
      }
      m.cols[out] = j;
      m.vals[out] = 1.0 / std::sqrt(di * norm.degrees[j]);
      ++out;
    }
    if (!self_placed) {
      m.cols[out] = static_cast<NodeId>(i);
      m.vals[out] = 1.0 / di;
      ++out;
    }
  }
  return norm;
}

int resolve_class(const AttributedGraph& graph, const std::string& name) {
  for (std::size_t c = 0; c < graph.class_names.size(); ++c)
    if (graph.class_names[c] == name) return static_cast<int>(c);
  std::string known;
  for (const auto& c : graph.class_names) {
    if (!known.empty()) known += ", ";
    known += "'" + c + "'";
  }
  throw ValidationError("unknown class '" + name + "' (known: " + known + ")");
}

}  // namespace ocgraph
