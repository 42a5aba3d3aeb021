#include "ocgraph/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ocgraph/hypersphere.hpp"
#include "ocgraph/metrics.hpp"

namespace ocgraph {

ExperimentReport run_experiment(const AttributedGraph& graph, int normal_class,
                                const SplitRatios& ratios,
                                const std::vector<std::uint64_t>& split_seeds,
                                const std::vector<LayerSpec>& specs,
                                const TrainConfig& config) {
  if (split_seeds.empty()) throw ValidationError("experiment needs at least one seed");
  const NormalizedAdjacency adj = normalize_adjacency(graph);

  ExperimentReport report;
  const auto run_start = std::chrono::steady_clock::now();
  for (std::uint64_t seed : split_seeds) {
    SeedResult r;
    r.seed = seed;
    const auto seed_start = std::chrono::steady_clock::now();
    try {
      OneClassSplit split = make_one_class_split(graph, normal_class, ratios, seed);
      TrainConfig cfg = config;
      cfg.seed = seed;
      OcgnnModel model = train(graph, adj, split, specs, cfg);

      Matrix z = encode_inference(graph, adj, model.weights, model.specs);
      ScoredSet test;
      test.scores.resize(split.test_ids.size());
      const double r_sq = model.sphere.radius * model.sphere.radius;
      std::vector<double> d = sq_distances(z, model.sphere.center);
      for (std::size_t i = 0; i < split.test_ids.size(); ++i)
        test.scores[i] = d[split.test_ids[i]] - r_sq;
      test.labels = split.test_labels;
      r.test_auc = roc_auc(test);
      r.best_epoch = model.best_epoch;
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
      ++report.num_failed;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - seed_start).count();
    report.seeds.push_back(std::move(r));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();

  std::size_t n = 0;
  double sum = 0.0;
  for (const SeedResult& r : report.seeds)
    if (r.ok) {
      sum += r.test_auc;
      ++n;
    }
  if (n == 0) {
    report.mean_test_auc = std::numeric_limits<double>::quiet_NaN();
    report.std_test_auc = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.mean_test_auc = sum / static_cast<double>(n);
  double acc = 0.0;
  for (const SeedResult& r : report.seeds)
    if (r.ok) {
      const double d = r.test_auc - report.mean_test_auc;
      acc += d * d;
    }
  report.std_test_auc = (n > 1) ? std::sqrt(acc / static_cast<double>(n - 1)) : 0.0;
  return report;
}

std::string format_double_exact(double x) { return nlohmann::json(x).dump(); }

std::string format_report_table(const ExperimentReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "seed" << std::right << std::setw(12) << "test-auc(%)"
      << std::setw(12) << "best-epoch" << std::setw(10) << "seconds"
      << "\n";
  out << std::fixed;
  for (const SeedResult& r : report.seeds) {
    out << std::left << std::setw(8) << r.seed << std::right;
    if (r.ok) {
      out << std::setw(12) << std::setprecision(2) << (100.0 * r.test_auc) << std::setw(12)
          << r.best_epoch << std::setw(10) << std::setprecision(1) << r.seconds << "\n";
    } else {
      out << std::setw(12) << "failed" << std::setw(12) << "-" << std::setw(10)
          << std::setprecision(1) << r.seconds << "  " << r.error << "\n";
    }
  }
  const std::size_t n = report.seeds.size() - report.num_failed;
  out << "mean test AUC: ";
  if (n == 0) {
    out << "n/a (all " << report.seeds.size() << " seeds failed)\n";
  } else {
    out << std::setprecision(2) << (100.0 * report.mean_test_auc) << " +/- "
        << (100.0 * report.std_test_auc) << " %  (" << n << " of " << report.seeds.size()
        << " seeds)\n";
  }
  out << "wall time: " << std::setprecision(1) << report.wall_seconds << " s\n";
  return out.str();
}

namespace {

void write_or_throw(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file " + path);
  out << content;
  if (!out) throw std::runtime_error("failed while writing report file " + path);
}

}  // namespace

void save_report_json(const ExperimentReport& report, const std::string& path) {
  using json = nlohmann::ordered_json;
  json j;
  j["seeds"] = json::array();
  for (const SeedResult& r : report.seeds) {
    json js;
    js["seed"] = r.seed;
    js["ok"] = r.ok;
    if (r.ok) {
      js["test_auc"] = r.test_auc;
      js["best_epoch"] = r.best_epoch;
    } else {
      js["error"] = r.error;
    }
    j["seeds"].push_back(std::move(js));
  }
  j["mean_test_auc"] = std::isfinite(report.mean_test_auc) ? json(report.mean_test_auc) : json();
  j["std_test_auc"] = std::isfinite(report.std_test_auc) ? json(report.std_test_auc) : json();
  j["num_failed"] = report.num_failed;
  write_or_throw(path, j.dump(2) + "\n");
}

void save_report_csv(const ExperimentReport& report, const std::string& path) {
  std::ostringstream out;
  out << "seed,test_auc,best_epoch,error\n";
  for (const SeedResult& r : report.seeds) {
    out << r.seed << ",";
    if (r.ok) {
      out << format_double_exact(r.test_auc) << "," << r.best_epoch << ",\n";
    } else {
      std::string quoted = "\"";
      for (char c : r.error) {
        quoted += c;
        if (c == '"') quoted += '"';
      }
      quoted += '"';
      out << ",," << quoted << "\n";
    }
  }
  write_or_throw(path, out.str());
}

}  // namespace ocgraph
