#include "ocgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ocgraph/errors.hpp"

namespace ocgraph {

double roc_auc(const ScoredSet& s) {
  const std::size_t n = s.scores.size();
  if (s.labels.size() != n)
    throw DimensionError("scores and labels differ in length");
  for (double x : s.scores)
    if (!std::isfinite(x)) throw ValidationError("ROC AUC requires finite scores");
  std::size_t n1 = 0;
  for (std::uint8_t l : s.labels) n1 += (l != 0);
  const std::size_t n0 = n - n1;
  if (n1 == 0 || n0 == 0)
    throw UndefinedMetricError("ROC AUC is undefined when only one class is present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] < s.scores[b];
  });

  // Sum the 1-based ranks of the anomalies, giving every member of a tie
  // group the group's mean rank.  All quantities are exact in doubles.
  double rank_sum = 0.0;
  std::size_t g0 = 0;
  while (g0 < n) {
    std::size_t g1 = g0 + 1;
    while (g1 < n && s.scores[order[g1]] == s.scores[order[g0]]) ++g1;
    const double midrank = (static_cast<double>(g0 + 1) + static_cast<double>(g1)) / 2.0;
    for (std::size_t i = g0; i < g1; ++i)
      if (s.labels[order[i]] != 0) rank_sum += midrank;
    g0 = g1;
  }
  const double u = rank_sum - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
  return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

Confusion confusion_at_zero(const ScoredSet& s) {
  if (s.labels.size() != s.scores.size())
    throw DimensionError("scores and labels differ in length");
  Confusion c;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    const bool predicted = s.scores[i] > 0.0;
    const bool actual = s.labels[i] != 0;
    if (predicted && actual) ++c.tp;
    else if (predicted && !actual) ++c.fp;
    else if (!predicted && actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

}  // namespace ocgraph
