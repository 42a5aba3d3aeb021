// ocgraph: one-class graph neural networks for node anomaly detection.
//
// Subcommands wire the library into a pipeline:
//   split       draw a one-class train/val/test split and write it as JSON
//   train       train a model on a split and write a checkpoint
//   score       score nodes with a trained model (CSV)
//   eval        test-set AUC and confusion counts for a checkpoint + split
//   experiment  multi-seed train/eval runs with a mean +/- std report
//
// Exit codes: 0 success, 1 runtime failure (divergence, IO), 2 usage or
// validation error.  OCGRAPH_THREADS caps internal parallelism.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ocgraph/checkpoint.hpp"
#include "ocgraph/errors.hpp"
#include "ocgraph/experiment.hpp"
#include "ocgraph/graph.hpp"
#include "ocgraph/hypersphere.hpp"
#include "ocgraph/layers.hpp"
#include "ocgraph/metrics.hpp"
#include "ocgraph/parallel.hpp"
#include "ocgraph/split.hpp"
#include "ocgraph/train.hpp"

namespace {

using namespace ocgraph;

struct GraphArgs {
  std::string features;
  std::string edges;
  std::string labels;
  bool drop_dangling = false;
};

void add_graph_options(CLI::App* sub, GraphArgs& args, bool labels_needed) {
  sub->add_option("--features", args.features, "node feature file (.content TSV or .csv)")
      ->required();
  sub->add_option("--edges", args.edges, "edge list file (.cites TSV or .csv)")->required();
  auto* labels = sub->add_option("--labels", args.labels,
                                 "per-node class labels (overrides labels embedded in the "
                                 "feature file)");
  if (labels_needed) {
    // Class labels may come embedded in a .content file, so --labels stays
    // optional even where classes are required; the library reports missing
    // labels with context.
    labels->description(labels->get_description() + " [required unless embedded]");
  }
  sub->add_flag("--drop-dangling-edges", args.drop_dangling,
                "skip edges whose endpoints have no feature row instead of failing");
}

AttributedGraph load(const GraphArgs& args) {
  LoadOptions opt;
  opt.drop_dangling_edges = args.drop_dangling;
  std::optional<std::string> labels;
  if (!args.labels.empty()) labels = args.labels;
  return load_graph(args.features, args.edges, labels, opt);
}

SplitRatios parse_ratios(const std::string& text) {
  SplitRatios r;
  double* slots[3] = {&r.train, &r.val, &r.test};
  std::size_t begin = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = (i == 2) ? text.size() : text.find(',', begin);
    if (end == std::string::npos)
      throw ConfigError("--ratios expects three comma-separated numbers, got '" + text + "'");
    const char* first = text.data() + begin;
    const char* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, *slots[i]);
    if (ec != std::errc{} || ptr != last)
      throw ConfigError("--ratios has a malformed number in '" + text + "'");
    begin = end + 1;
  }
  return r;
}

std::vector<LayerSpec> build_specs(const std::vector<std::string>& layer_args,
                                   std::size_t input_dim, double dropout_rate) {
  if (layer_args.empty()) throw ConfigError("at least one --layer kind:dim is required");
  std::vector<LayerSpec> specs;
  std::size_t in = input_dim;
  for (const std::string& arg : layer_args) {
    const std::size_t colon = arg.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= arg.size())
      throw ConfigError("--layer expects kind:dim, got '" + arg + "'");
    LayerSpec s;
    s.kind = layer_kind_from_name(arg.substr(0, colon));
    const char* first = arg.data() + colon + 1;
    const char* last = arg.data() + arg.size();
    auto [ptr, ec] = std::from_chars(first, last, s.out_dim);
    if (ec != std::errc{} || ptr != last || s.out_dim == 0)
      throw ConfigError("--layer has a malformed dimension in '" + arg + "'");
    s.in_dim = in;
    in = s.out_dim;
    specs.push_back(s);
  }
  specs.back().has_activation = false;
  for (std::size_t l = 0; l + 1 < specs.size(); ++l) specs[l].dropout_rate = dropout_rate;
  validate_specs(specs);
  return specs;
}

void add_train_options(CLI::App* sub, TrainConfig& cfg, std::vector<std::string>& layers) {
  sub->add_option("--layer", layers, "encoder layer as kind:dim (gcn, sage-mean, sage-pool); repeatable")
      ->required();
  sub->add_option("--beta", cfg.beta, "slack fraction in (0,1]")->capture_default_str();
  sub->add_option("--lambda", cfg.weight_decay, "weight decay coefficient")->capture_default_str();
  sub->add_option("--lr", cfg.learning_rate, "Adam learning rate")->capture_default_str();
  sub->add_option("--dropout", cfg.dropout_rate, "dropout rate after each activation")
      ->capture_default_str();
  sub->add_option("--phi", cfg.radius_update_interval, "epochs between radius updates")
      ->capture_default_str();
  sub->add_option("--max-epochs", cfg.max_epochs, "training epoch cap")->capture_default_str();
  sub->add_option("--patience", cfg.patience, "early-stopping patience in epochs")
      ->capture_default_str();
}

std::vector<double> node_scores(const AttributedGraph& graph, const OcgnnModel& model) {
  const NormalizedAdjacency adj = normalize_adjacency(graph);
  Matrix z = encode_inference(graph, adj, model.weights, model.specs);
  return anomaly_scores(z, model.sphere);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file " + path);
  out << content;
  if (!out) throw std::runtime_error("failed while writing output file " + path);
}

int cmd_split(const GraphArgs& graph_args, const std::string& normal_class,
              const std::string& ratios_text, std::uint64_t seed, const std::string& out_path) {
  AttributedGraph graph = load(graph_args);
  const int normal = resolve_class(graph, normal_class);
  OneClassSplit split = make_one_class_split(graph, normal, parse_ratios(ratios_text), seed);
  save_split(split, out_path);
  std::size_t val_anom = 0, test_anom = 0;
  for (auto l : split.val_labels) val_anom += l;
  for (auto l : split.test_labels) test_anom += l;
  std::cout << "split written to " << out_path << "\n"
            << "train " << split.train_ids.size() << " (all normal) / val "
            << split.val_ids.size() << " (" << val_anom << " anomalous) / test "
            << split.test_ids.size() << " (" << test_anom << " anomalous)\n";
  return 0;
}

int cmd_train(const GraphArgs& graph_args, const std::string& split_path,
              const std::vector<std::string>& layer_args, TrainConfig cfg,
              const std::string& checkpoint_path) {
  AttributedGraph graph = load(graph_args);
  OneClassSplit split = load_split(split_path);
  validate_split(split, graph);
  const std::vector<LayerSpec> specs = build_specs(layer_args, graph.feature_dim(), cfg.dropout_rate);
  const NormalizedAdjacency adj = normalize_adjacency(graph);
  OcgnnModel model = train(graph, adj, split, specs, cfg);
  save_model(model, checkpoint_path);
  std::cout << "trained " << model.training_history.size() << " epochs; best epoch "
            << model.best_epoch << " with val AUC " << format_double_exact(model.best_val_auc)
            << "; radius " << format_double_exact(model.sphere.radius) << "\n"
            << "checkpoint written to " << checkpoint_path << "\n";
  return 0;
}

int cmd_score(const std::string& checkpoint_path, const GraphArgs& graph_args, bool all_nodes,
              const std::vector<std::string>& ids, const std::string& out_path) {
  if (all_nodes && !ids.empty())
    throw ValidationError("give node ids or --all, not both");
  if (!all_nodes && ids.empty())
    throw ValidationError("nothing to score: list node ids or pass --all");
  OcgnnModel model = load_model(checkpoint_path);
  AttributedGraph graph = load(graph_args);
  const std::vector<double> scores = node_scores(graph, model);

  std::vector<NodeId> rows;
  if (all_nodes) {
    rows.resize(graph.num_nodes);
    for (std::size_t i = 0; i < graph.num_nodes; ++i) rows[i] = static_cast<NodeId>(i);
  } else {
    std::unordered_map<std::string, NodeId> index;
    index.reserve(graph.node_ids.size());
    for (std::size_t i = 0; i < graph.node_ids.size(); ++i)
      index.emplace(graph.node_ids[i], static_cast<NodeId>(i));
    for (const std::string& id : ids) {
      auto it = index.find(id);
      if (it == index.end()) throw ValidationError("unknown node id '" + id + "'");
      rows.push_back(it->second);
    }
  }

  std::string csv = "node_id,score,is_anomalous\n";
  for (NodeId r : rows) {
    const double s = scores[r];
    csv += graph.node_ids[r];
    csv += ',';
    csv += format_double_exact(s);
    csv += ',';
    csv += (s > 0.0) ? '1' : '0';
    csv += '\n';
  }
  if (out_path.empty())
    std::cout << csv;
  else {
    write_text(out_path, csv);
    std::cout << "scores for " << rows.size() << " nodes written to " << out_path << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const GraphArgs& graph_args,
             const std::string& split_path, const std::string& out_path) {
  OcgnnModel model = load_model(checkpoint_path);
  AttributedGraph graph = load(graph_args);
  OneClassSplit split = load_split(split_path);
  validate_split(split, graph);
  const std::vector<double> scores = node_scores(graph, model);

  ScoredSet test;
  test.scores.reserve(split.test_ids.size());
  for (NodeId id : split.test_ids) test.scores.push_back(scores[id]);
  test.labels = split.test_labels;
  const double auc = roc_auc(test);
  const Confusion c = confusion_at_zero(test);
  std::cout << "test AUC: " << format_double_exact(auc) << "\n"
            << "confusion at S=0: TP " << c.tp << "  FP " << c.fp << "  TN " << c.tn << "  FN "
            << c.fn << "\n";
  if (!out_path.empty()) {
    nlohmann::ordered_json j;
    j["test_auc"] = auc;
    j["tp"] = c.tp;
    j["fp"] = c.fp;
    j["tn"] = c.tn;
    j["fn"] = c.fn;
    write_text(out_path, j.dump(2) + "\n");
    std::cout << "metrics written to " << out_path << "\n";
  }
  return 0;
}

int cmd_experiment(const GraphArgs& graph_args, const std::string& normal_class,
                   const std::string& ratios_text, std::uint64_t base_seed, std::size_t num_seeds,
                   const std::vector<std::string>& layer_args, TrainConfig cfg,
                   const std::string& out_path) {
  if (num_seeds == 0) throw ValidationError("--seeds must be at least 1");
  AttributedGraph graph = load(graph_args);
  const int normal = resolve_class(graph, normal_class);
  const SplitRatios ratios = parse_ratios(ratios_text);
  const std::vector<LayerSpec> specs = build_specs(layer_args, graph.feature_dim(), cfg.dropout_rate);
  std::vector<std::uint64_t> seeds(num_seeds);
  for (std::size_t i = 0; i < num_seeds; ++i) seeds[i] = base_seed + i;

  const ExperimentReport report = run_experiment(graph, normal, ratios, seeds, specs, cfg);
  std::cout << format_report_table(report);
  if (!out_path.empty()) {
    if (out_path.size() >= 5 && out_path.compare(out_path.size() - 5, 5, ".json") == 0)
      save_report_json(report, out_path);
    else if (out_path.size() >= 4 && out_path.compare(out_path.size() - 4, 4, ".csv") == 0)
      save_report_csv(report, out_path);
    else
      throw ValidationError("experiment --out must end in .json or .csv");
    std::cout << "report written to " << out_path << "\n";
  }
  if (report.num_failed > 0) {
    std::cerr << report.num_failed << " of " << report.seeds.size() << " seeds failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  // Resolves OCGRAPH_THREADS and pins the BLAS thread count before any math.
  max_threads();

  CLI::App app{"one-class graph neural networks for node anomaly detection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from an INI/TOML file");

  GraphArgs graph_args;
  TrainConfig cfg;
  std::vector<std::string> layer_args;
  std::string normal_class;
  std::string ratios_text = "0.6,0.15,0.25";
  std::string split_path;
  std::string checkpoint_path;
  std::string out_path;
  std::vector<std::string> score_ids;
  bool score_all = false;
  std::uint64_t seed = 1;
  std::size_t num_seeds = 10;

  CLI::App* sub_split = app.add_subcommand("split", "draw a one-class train/val/test split");
  add_graph_options(sub_split, graph_args, /*labels_needed=*/true);
  sub_split->add_option("--normal-class", normal_class, "class treated as normal")->required();
  sub_split->add_option("--ratios", ratios_text, "train,val,test fractions")->capture_default_str();
  sub_split->add_option("--seed", seed, "split seed")->capture_default_str();
  sub_split->add_option("--out", out_path, "where to write the split JSON")->required();

  CLI::App* sub_train = app.add_subcommand("train", "train a one-class model on a split");
  add_graph_options(sub_train, graph_args, /*labels_needed=*/false);
  sub_train->add_option("--split", split_path, "split JSON from the split subcommand")->required();
  add_train_options(sub_train, cfg, layer_args);
  sub_train->add_option("--seed", cfg.seed, "training seed")->capture_default_str();
  sub_train->add_option("--checkpoint", checkpoint_path, "where to write the model checkpoint")
      ->required();

  CLI::App* sub_score = app.add_subcommand("score", "score nodes with a trained model");
  sub_score->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
  add_graph_options(sub_score, graph_args, /*labels_needed=*/false);
  sub_score->add_flag("--all", score_all, "score every node");
  sub_score->add_option("ids", score_ids, "node ids to score");
  sub_score->add_option("--out", out_path, "write CSV here instead of stdout");

  CLI::App* sub_eval = app.add_subcommand("eval", "evaluate a checkpoint on a split's test set");
  sub_eval->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
  add_graph_options(sub_eval, graph_args, /*labels_needed=*/false);
  sub_eval->add_option("--split", split_path, "split JSON")->required();
  sub_eval->add_option("--out", out_path, "also write metrics JSON here");

  CLI::App* sub_exp = app.add_subcommand("experiment", "multi-seed splits + training runs");
  add_graph_options(sub_exp, graph_args, /*labels_needed=*/true);
  sub_exp->add_option("--normal-class", normal_class, "class treated as normal")->required();
  sub_exp->add_option("--ratios", ratios_text, "train,val,test fractions")->capture_default_str();
  add_train_options(sub_exp, cfg, layer_args);
  sub_exp->add_option("--seed", seed, "first seed; runs use seed..seed+n-1")->capture_default_str();
  sub_exp->add_option("--seeds", num_seeds, "number of seeds")->capture_default_str();
  sub_exp->add_option("--out", out_path, "write the report here (.json or .csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sub_split->parsed())
      return cmd_split(graph_args, normal_class, ratios_text, seed, out_path);
    if (sub_train->parsed())
      return cmd_train(graph_args, split_path, layer_args, cfg, checkpoint_path);
    if (sub_score->parsed())
      return cmd_score(checkpoint_path, graph_args, score_all, score_ids, out_path);
    if (sub_eval->parsed())
      return cmd_eval(checkpoint_path, graph_args, split_path, out_path);
    if (sub_exp->parsed())
      return cmd_experiment(graph_args, normal_class, ratios_text, seed, num_seeds, layer_args,
                            cfg, out_path);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const ocgraph::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
