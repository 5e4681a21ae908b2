#pragma once

#include <cstddef>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <string_view>

namespace sahg {

enum class Variant { Full, NoGraph, NoSector, NoHyperbolic, IsotropicGamma };
enum class Precision { F32, F64 };
// Where the graph channel's edges come from when the dataset is loaded.
enum class GraphSource { Auto, Knn, Random };

std::string_view to_string(Variant v);
std::string_view to_string(Precision p);
std::string_view to_string(GraphSource g);
Variant parse_variant(std::string_view name);
Precision parse_precision(std::string_view name);
GraphSource parse_graph_source(std::string_view name);

inline constexpr Variant kAllVariants[] = {Variant::Full, Variant::NoGraph, Variant::NoSector,
                                           Variant::NoHyperbolic, Variant::IsotropicGamma};

/// Every training hyperparameter. Defaults are the published default
/// settings; dataset presets override a subset.
struct TrainConfig {
  std::size_t hidden_dim = 128;
  std::size_t projection_dim = 64;
  std::size_t num_prototypes = 2;
  double temperature_init = 5.0;
  std::size_t warp_hidden_dim = 32;
  double dropout = 0.25;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  std::size_t batch_size = 512;
  std::size_t max_epochs = 120;
  std::size_t patience = 15;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  double entropy_weight = 0.03;  // lambda_0
  std::size_t warmup_epochs = 20;
  std::size_t knn_k = 10;
  double grad_clip_norm = 1.0;
  std::uint64_t seed = 0;
  Variant variant = Variant::Full;
  Precision precision = Precision::F32;
  GraphSource graph = GraphSource::Auto;

  // Throws ParameterError on the first out-of-range value.
  void validate() const;
};

// JSON keys follow the hyperparameter table rows in snake_case.
nlohmann::json to_json(const TrainConfig& cfg);
// Overlays the keys present in `j`; unknown keys throw ParameterError.
TrainConfig apply_json(TrainConfig base, const nlohmann::json& j);
TrainConfig load_config_file(const std::string& path, TrainConfig base = {});

// "default", "fox8-23", "botsim-24", "mgtab".
TrainConfig preset(std::string_view name);

}  // namespace sahg
