#include "ocgraph/checkpoint.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ocgraph/errors.hpp"

namespace ocgraph {

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Matrix& m) {
  if (m.size() == 0) return nullptr;
  json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["data"] = m.data;
  return j;
}

[[noreturn]] void corrupt(const std::string& path, const std::string& why) {
  throw CorruptFileError("checkpoint " + path + ": " + why);
}

Matrix matrix_from_json(const json& j, const std::string& path, const std::string& what) {
  if (j.is_null()) return Matrix();
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    corrupt(path, what + " is not a matrix object");
  Matrix m;
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols)
    corrupt(path, what + " has " + std::to_string(m.data.size()) + " entries for shape " +
                      std::to_string(m.rows) + "x" + std::to_string(m.cols));
  if (!all_finite(m)) corrupt(path, what + " contains non-finite values");
  return m;
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols,
                   const std::string& path, const std::string& what) {
  if (m.rows != rows || m.cols != cols)
    corrupt(path, what + " has shape " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                      ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace

void save_model(const OcgnnModel& model, const std::string& path) {
  json j;
  j["version"] = 1;
  j["specs"] = json::array();
  for (const LayerSpec& s : model.specs) {
    json js;
    js["kind"] = layer_kind_name(s.kind);
    js["in_dim"] = s.in_dim;
    js["out_dim"] = s.out_dim;
    js["has_activation"] = s.has_activation;
    js["dropout_rate"] = s.dropout_rate;
    j["specs"].push_back(std::move(js));
  }
  j["weights"] = json::array();
  for (const LayerWeights& lw : model.weights.layers) {
    json jw;
    jw["w"] = matrix_to_json(lw.w);
    jw["w_pool"] = matrix_to_json(lw.w_pool);
    jw["b_pool"] = matrix_to_json(lw.b_pool);
    j["weights"].push_back(std::move(jw));
  }
  j["center"] = model.sphere.center;
  j["radius"] = model.sphere.radius;
  json jc;
  jc["beta"] = model.config.beta;
  jc["weight_decay"] = model.config.weight_decay;
  jc["learning_rate"] = model.config.learning_rate;
  jc["radius_update_interval"] = model.config.radius_update_interval;
  jc["max_epochs"] = model.config.max_epochs;
  jc["patience"] = model.config.patience;
  jc["dropout_rate"] = model.config.dropout_rate;
  jc["seed"] = model.config.seed;
  j["config"] = std::move(jc);
  j["best_val_auc"] = model.best_val_auc;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint file " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed while writing checkpoint file " + path);
}

OcgnnModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    corrupt(path, std::string("invalid JSON (") + e.what() + ")");
  }

  try {
    if (!j.is_object()) corrupt(path, "top level is not an object");
    if (!j.contains("version") || !j.at("version").is_number_integer())
      corrupt(path, "missing version");
    const auto version = j.at("version").get<std::int64_t>();
    if (version != 1)
      corrupt(path, "unsupported version " + std::to_string(version));
    for (const char* key : {"specs", "weights", "center", "radius", "config", "best_val_auc"})
      if (!j.contains(key)) corrupt(path, std::string("missing field '") + key + "'");

    OcgnnModel model;
    for (const json& js : j.at("specs")) {
      LayerSpec s;
      s.kind = layer_kind_from_name(js.at("kind").get<std::string>());
      s.in_dim = js.at("in_dim").get<std::size_t>();
      s.out_dim = js.at("out_dim").get<std::size_t>();
      s.has_activation = js.at("has_activation").get<bool>();
      s.dropout_rate = js.at("dropout_rate").get<double>();
      model.specs.push_back(s);
    }
    validate_specs(model.specs);

    if (j.at("weights").size() != model.specs.size())
      corrupt(path, "weight count does not match layer count");
    for (std::size_t l = 0; l < model.specs.size(); ++l) {
      const LayerSpec& s = model.specs[l];
      const json& jw = j.at("weights").at(l);
      LayerWeights lw;
      const std::string tag = "layer " + std::to_string(l);
      lw.w = matrix_from_json(jw.at("w"), path, tag + " weight");
      lw.w_pool = matrix_from_json(jw.at("w_pool"), path, tag + " pool weight");
      lw.b_pool = matrix_from_json(jw.at("b_pool"), path, tag + " pool bias");
      const std::size_t self_in = (s.kind == LayerKind::kGcn) ? s.in_dim : 2 * s.in_dim;
      require_shape(lw.w, self_in, s.out_dim, path, tag + " weight");
      if (s.kind == LayerKind::kSagePool) {
        require_shape(lw.w_pool, s.in_dim, s.in_dim, path, tag + " pool weight");
        require_shape(lw.b_pool, 1, s.in_dim, path, tag + " pool bias");
      } else if (lw.w_pool.size() != 0 || lw.b_pool.size() != 0) {
        corrupt(path, tag + " carries pool parameters but is not a pool layer");
      }
      model.weights.layers.push_back(std::move(lw));
    }

    model.sphere.center = j.at("center").get<std::vector<double>>();
    if (model.sphere.center.size() != model.specs.back().out_dim)
      corrupt(path, "center width does not match the final layer");
    model.sphere.radius = j.at("radius").get<double>();
    for (double x : model.sphere.center)
      if (!std::isfinite(x)) corrupt(path, "center contains non-finite values");
    if (!std::isfinite(model.sphere.radius) || model.sphere.radius < 0.0)
      corrupt(path, "radius must be finite and non-negative");

    const json& jc = j.at("config");
    model.config.beta = jc.at("beta").get<double>();
    model.config.weight_decay = jc.at("weight_decay").get<double>();
    model.config.learning_rate = jc.at("learning_rate").get<double>();
    model.config.radius_update_interval = jc.at("radius_update_interval").get<std::size_t>();
    model.config.max_epochs = jc.at("max_epochs").get<std::size_t>();
    model.config.patience = jc.at("patience").get<std::size_t>();
    model.config.dropout_rate = jc.at("dropout_rate").get<double>();
    model.config.seed = jc.at("seed").get<std::uint64_t>();
    validate_config(model.config);

    model.best_val_auc = j.at("best_val_auc").get<double>();
    return model;
  } catch (const json::exception& e) {
    corrupt(path, std::string("malformed field (") + e.what() + ")");
  }
}

}  // namespace ocgraph
