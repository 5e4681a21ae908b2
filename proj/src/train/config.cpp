#include "sahg/train/config.hpp"

#include <fstream>
#include <sstream>

#include "sahg/error.hpp"

namespace sahg {

using nlohmann::json;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoGraph: return "no-graph";
    case Variant::NoSector: return "no-sector";
    case Variant::NoHyperbolic: return "no-hyperbolic";
    case Variant::IsotropicGamma: return "isotropic";
  }
  return "?";
}

std::string_view to_string(Precision p) { return p == Precision::F32 ? "f32" : "f64"; }

std::string_view to_string(GraphSource g) {
  switch (g) {
    case GraphSource::Auto: return "auto";
    case GraphSource::Knn: return "knn";
    case GraphSource::Random: return "random";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (auto v : kAllVariants) {
    if (to_string(v) == name) return v;
  }
  throw ParameterError("unknown variant \"" + std::string(name) +
                       "\" (expected full, no-graph, no-sector, no-hyperbolic, isotropic)");
}

Precision parse_precision(std::string_view name) {
  if (name == "f32") return Precision::F32;
  if (name == "f64") return Precision::F64;
  throw ParameterError("unknown precision \"" + std::string(name) + "\" (expected f32 or f64)");
}

GraphSource parse_graph_source(std::string_view name) {
  for (auto g : {GraphSource::Auto, GraphSource::Knn, GraphSource::Random}) {
    if (to_string(g) == name) return g;
  }
  throw ParameterError("unknown graph source \"" + std::string(name) + "\" (expected auto, knn, random)");
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ParameterError(std::string("invalid config: ") + what);
  };
  require(hidden_dim >= 1, "encoder_hidden_dim >= 1");
  require(projection_dim >= 1, "projection_dim >= 1");
  require(num_prototypes >= 1, "num_sector_prototypes >= 1");
  require(temperature_init > 0.0, "sector_temperature_init > 0");
  require(warp_hidden_dim >= 1, "localwarpnet_hidden_dim >= 1");
  require(dropout >= 0.0 && dropout < 1.0, "0 <= dropout_rate < 1");
  require(learning_rate > 0.0, "learning_rate > 0");
  require(weight_decay >= 0.0, "weight_decay >= 0");
  require(batch_size >= 1, "batch_size >= 1");
  require(max_epochs >= 1, "max_epochs >= 1");
  require(patience >= 1, "early_stopping_patience >= 1");
  require(focal_alpha > 0.0 && focal_alpha <= 1.0, "0 < focal_alpha <= 1");
  require(focal_gamma >= 0.0, "focal_gamma >= 0");
  require(entropy_weight >= 0.0, "entropy_weight >= 0");
  require(knn_k >= 1, "knn_k >= 1");
  require(grad_clip_norm > 0.0, "grad_clip_norm > 0");
}

json to_json(const TrainConfig& c) {
  return json{
      {"projection_dim", c.projection_dim},
      {"encoder_hidden_dim", c.hidden_dim},
      {"num_sector_prototypes", c.num_prototypes},
      {"sector_temperature_init", c.temperature_init},
      {"localwarpnet_hidden_dim", c.warp_hidden_dim},
      {"dropout_rate", c.dropout},
      {"optimizer", "adamw"},
      {"learning_rate", c.learning_rate},
      {"weight_decay", c.weight_decay},
      {"batch_size", c.batch_size},
      {"max_epochs", c.max_epochs},
      {"early_stopping_patience", c.patience},
      {"focal_alpha", c.focal_alpha},
      {"focal_gamma", c.focal_gamma},
      {"entropy_weight", c.entropy_weight},
      {"warmup_epochs", c.warmup_epochs},
      {"knn_k", c.knn_k},
      {"grad_clip_norm", c.grad_clip_norm},
      {"seed", c.seed},
      {"variant", std::string(to_string(c.variant))},
      {"precision", std::string(to_string(c.precision))},
      {"graph", std::string(to_string(c.graph))},
  };
}

TrainConfig apply_json(TrainConfig c, const json& j) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "projection_dim") c.projection_dim = v.get<std::size_t>();
      else if (key == "encoder_hidden_dim") c.hidden_dim = v.get<std::size_t>();
      else if (key == "num_sector_prototypes") c.num_prototypes = v.get<std::size_t>();
      else if (key == "sector_temperature_init") c.temperature_init = v.get<double>();
      else if (key == "localwarpnet_hidden_dim") c.warp_hidden_dim = v.get<std::size_t>();
      else if (key == "dropout_rate") c.dropout = v.get<double>();
      else if (key == "optimizer") {
        if (v.get<std::string>() != "adamw") throw ParameterError("only the adamw optimizer is supported");
      } else if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "weight_decay") c.weight_decay = v.get<double>();
      else if (key == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (key == "max_epochs") c.max_epochs = v.get<std::size_t>();
      else if (key == "early_stopping_patience") c.patience = v.get<std::size_t>();
      else if (key == "focal_alpha") c.focal_alpha = v.get<double>();
      else if (key == "focal_gamma") c.focal_gamma = v.get<double>();
      else if (key == "entropy_weight") c.entropy_weight = v.get<double>();
      else if (key == "warmup_epochs") c.warmup_epochs = v.get<std::size_t>();
      else if (key == "knn_k") c.knn_k = v.get<std::size_t>();
      else if (key == "grad_clip_norm") c.grad_clip_norm = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "variant") c.variant = parse_variant(v.get<std::string>());
      else if (key == "precision") c.precision = parse_precision(v.get<std::string>());
      else if (key == "graph") c.graph = parse_graph_source(v.get<std::string>());
      else if (key == "comment") continue;
      else throw ParameterError("unknown config key \"" + key + "\"");
    } catch (const json::exception& e) {
      throw ParameterError("config key \"" + key + "\": " + e.what());
    }
  }
  return c;
}

TrainConfig load_config_file(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError("config file " + path + ": " + e.what());
  }
  return apply_json(std::move(base), j);
}

TrainConfig preset(std::string_view name) {
  TrainConfig c;
  if (name == "default") return c;
  if (name == "fox8-23") {
    c.hidden_dim = 128;
    c.projection_dim = 64;
    c.dropout = 0.25;
    c.learning_rate = 3e-4;
    c.batch_size = 128;
    c.max_epochs = 120;
    c.focal_alpha = 0.25;
    c.focal_gamma = 2.0;
    c.entropy_weight = 0.03;
    c.knn_k = 10;
    return c;
  }
  if (name == "botsim-24") {
    c.hidden_dim = 64;
    c.projection_dim = 32;
    c.dropout = 0.30;
    c.learning_rate = 3e-4;
    c.batch_size = 256;
    c.max_epochs = 120;
    c.focal_alpha = 0.80;
    c.focal_gamma = 2.0;
    c.entropy_weight = 0.03;
    c.knn_k = 10;
    return c;
  }
  if (name == "mgtab") {
    c.hidden_dim = 256;
    c.projection_dim = 64;
    c.dropout = 0.30;
    c.learning_rate = 2e-4;
    c.batch_size = 512;
    c.max_epochs = 80;
    c.weight_decay = 1e-4;
    c.focal_alpha = 0.85;
    c.focal_gamma = 0.5;
    c.entropy_weight = 0.05;
    return c;
  }
  throw ParameterError("unknown preset \"" + std::string(name) + "\"");
}

}  // namespace sahg
