#include "ocgraph/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ocgraph/errors.hpp"
#include "ocgraph/rng.hpp"

namespace ocgraph {

OneClassSplit make_one_class_split(const AttributedGraph& graph, int normal_class,
                                   const SplitRatios& ratios, std::uint64_t seed) {
  if (!graph.labels) throw ValidationError("one-class split requires a labeled graph");
  if (normal_class < 0 || normal_class >= static_cast<int>(graph.class_names.size()))
    throw ValidationError("unknown normal class id " + std::to_string(normal_class));
  if (!(ratios.train > 0.0) || !(ratios.val > 0.0) || !(ratios.test > 0.0))
    throw ValidationError("split ratios must be positive");
  if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw ValidationError("split ratios must sum to 1");

  std::vector<NodeId> normal;
  std::vector<NodeId> anomalous;
  const auto& labels = *graph.labels;
  for (std::size_t i = 0; i < graph.num_nodes; ++i) {
    if (labels[i] == normal_class)
      normal.push_back(static_cast<NodeId>(i));
    else if (labels[i] >= 0)
      anomalous.push_back(static_cast<NodeId>(i));
  }
  if (normal.empty()) throw ValidationError("normal class has no nodes");

  const std::size_t k = normal.size();
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(k) * ratios.train));
  const auto n_val =
      static_cast<std::size_t>(std::floor(static_cast<double>(k) * ratios.val + 0.5));
  const std::size_t n_test = k - n_train - n_val;

  Rng rng(derive_seed(seed, seed_stream::kSplit));
  rng.shuffle(normal);
  rng.shuffle(anomalous);

  const std::size_t need = n_val + n_test;
  if (anomalous.size() < need)
    throw CapacityError("need " + std::to_string(need) + " anomalous nodes for val/test, only " +
                        std::to_string(anomalous.size()) + " available");

  OneClassSplit split;
  split.seed = seed;
  split.train_ids.assign(normal.begin(), normal.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val_ids.assign(normal.begin() + static_cast<std::ptrdiff_t>(n_train),
                       normal.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test_ids.assign(normal.begin() + static_cast<std::ptrdiff_t>(n_train + n_val),
                        normal.end());
  split.val_labels.assign(n_val, 0);
  split.test_labels.assign(n_test, 0);
  for (std::size_t i = 0; i < n_val; ++i) {
    split.val_ids.push_back(anomalous[i]);
    split.val_labels.push_back(1);
  }
  for (std::size_t i = 0; i < n_test; ++i) {
    split.test_ids.push_back(anomalous[n_val + i]);
    split.test_labels.push_back(1);
  }
  return split;
}

void save_split(const OneClassSplit& split, const std::string& path) {
  nlohmann::ordered_json j;
  j["train"] = split.train_ids;
  auto pairs = [](const std::vector<NodeId>& ids, const std::vector<std::uint8_t>& labels) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < ids.size(); ++i)
      arr.push_back({ids[i], static_cast<int>(labels[i])});
    return arr;
  };
  j["val"] = pairs(split.val_ids, split.val_labels);
  j["test"] = pairs(split.test_ids, split.test_labels);
  j["seed"] = split.seed;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write split file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing split file: " + path);
}

OneClassSplit load_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open split file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError("split file " + path + ": " + e.what());
  }
  OneClassSplit split;
  try {
    for (const auto& v : j.at("train")) split.train_ids.push_back(v.get<NodeId>());
    auto read_pairs = [&](const char* key, std::vector<NodeId>& ids,
                          std::vector<std::uint8_t>& labels) {
      for (const auto& p : j.at(key)) {
        if (!p.is_array() || p.size() != 2)
          throw CorruptFileError("split file " + path + ": '" + key +
                                 "' entries must be [id, label] pairs");
        int label = p[1].get<int>();
        if (label != 0 && label != 1)
          throw CorruptFileError("split file " + path + ": label must be 0 or 1");
        ids.push_back(p[0].get<NodeId>());
        labels.push_back(static_cast<std::uint8_t>(label));
      }
    };
    read_pairs("val", split.val_ids, split.val_labels);
    read_pairs("test", split.test_ids, split.test_labels);
    split.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError("split file " + path + ": " + e.what());
  }
  return split;
}

void validate_split(const OneClassSplit& split, const AttributedGraph& graph) {
  std::unordered_set<NodeId> seen;
  auto check = [&](const std::vector<NodeId>& ids, const char* part) {
    for (NodeId id : ids) {
      if (id >= graph.num_nodes)
        throw ValidationError(std::string("split ") + part + " id " + std::to_string(id) +
                              " out of range (N=" + std::to_string(graph.num_nodes) + ")");
      if (!seen.insert(id).second)
        throw ValidationError("split parts are not disjoint (node " + std::to_string(id) + ")");
    }
  };
  check(split.train_ids, "train");
  check(split.val_ids, "val");
  check(split.test_ids, "test");
  if (split.val_ids.size() != split.val_labels.size() ||
      split.test_ids.size() != split.test_labels.size())
    throw ValidationError("split labels not parallel to ids");
}

}  // namespace ocgraph
