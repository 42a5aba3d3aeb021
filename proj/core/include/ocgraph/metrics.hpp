#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ocgraph {

// Scores paired with binary ground truth (1 = anomaly).  Higher score should
// mean more anomalous.
struct ScoredSet {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

// Area under the ROC curve via the rank statistic, with midranks for tied
// scores (a tied anomaly/normal pair contributes 1/2).  Throws
// UndefinedMetricError unless both classes are present.
double roc_auc(const ScoredSet& s);

// Counts at the natural decision threshold of the anomaly score: positive
// (score > 0) predicts anomaly.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

Confusion confusion_at_zero(const ScoredSet& s);

}  // namespace ocgraph
