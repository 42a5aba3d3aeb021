#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "ocgraph/graph.hpp"

namespace ocgraph {

// One-class split: train is all normal nodes; val and test each mix normal
// nodes with an equal number of sampled anomalous (non-normal-class) nodes.
struct OneClassSplit {
  std::vector<NodeId> train_ids;
  std::vector<NodeId> val_ids;
  std::vector<NodeId> test_ids;
  std::vector<std::uint8_t> val_labels;   // parallel to val_ids, 1 = anomaly
  std::vector<std::uint8_t> test_labels;  // parallel to test_ids
  std::uint64_t seed = 0;
};

struct SplitRatios {
  double train = 0.60;
  double val = 0.15;
  double test = 0.25;
};

// Partitions the normal-class nodes by the ratios (seeded shuffle;
// n_train = floor, n_val = round-half-up, n_test = remainder) and samples
// anomalies without replacement to fill the val/test halves. Deterministic
// for a fixed seed.
OneClassSplit make_one_class_split(const AttributedGraph& graph, int normal_class,
                                   const SplitRatios& ratios, std::uint64_t seed);

// JSON form: {"train": [...], "val": [[id,label],...], "test": [[id,label],...], "seed": n}
void save_split(const OneClassSplit& split, const std::string& path);
OneClassSplit load_split(const std::string& path);

// Checks a (possibly loaded) split against a graph: ids in range, parts
// pairwise disjoint, labels parallel to ids.
void validate_split(const OneClassSplit& split, const AttributedGraph& graph);

}  // namespace ocgraph
