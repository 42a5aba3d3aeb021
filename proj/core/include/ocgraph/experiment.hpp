#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocgraph/graph.hpp"
#include "ocgraph/split.hpp"
#include "ocgraph/train.hpp"

namespace ocgraph {

// Outcome of one seed of an experiment.  A failed seed keeps its error text;
// its numeric fields are meaningless.
struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  double test_auc = 0.0;
  std::size_t best_epoch = 0;
  double seconds = 0.0;
  std::string error;
};

struct ExperimentReport {
  std::vector<SeedResult> seeds;
  double mean_test_auc = 0.0;  // over successful seeds; NaN if none succeeded
  double std_test_auc = 0.0;   // sample (n-1) std-dev; 0 for a single seed
  std::size_t num_failed = 0;
  double wall_seconds = 0.0;
};

// One full multi-seed run: per seed, draw a fresh one-class split (the seed
// drives both the split and the training RNG streams), train, and score the
// test set.  Seeds run sequentially and results are reported in seed order.
// A seed that throws is recorded as failed rather than aborting the rest.
ExperimentReport run_experiment(const AttributedGraph& graph, int normal_class,
                                const SplitRatios& ratios,
                                const std::vector<std::uint64_t>& split_seeds,
                                const std::vector<LayerSpec>& specs,
                                const TrainConfig& config);

// Aligned plain-text table with AUC in percent, one row per seed, plus the
// mean ± std summary line and total wall time.
std::string format_report_table(const ExperimentReport& report);

// Shortest decimal form that parses back to exactly the same double; used for
// every numeric field of machine-readable outputs.
std::string format_double_exact(double x);

// File exports carry everything except wall-clock times, so identical inputs
// and seeds reproduce them byte for byte.
void save_report_json(const ExperimentReport& report, const std::string& path);
void save_report_csv(const ExperimentReport& report, const std::string& path);

}  // namespace ocgraph
