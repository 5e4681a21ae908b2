#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sahg/autodiff/tensor.hpp"
#include "sahg/train/config.hpp"

namespace sahg::model {

using ad::Tensor;

inline constexpr double kGammaFloor = 1e-2;  // epsilon_0 in the warp net output
inline constexpr double kEps = 1e-6;
inline constexpr std::size_t kHeadHidden = 32;

struct ModelDims {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 128;
  std::size_t projection_dim = 64;
  std::size_t num_prototypes = 2;
  std::size_t warp_hidden_dim = 32;
  double temperature_init = 5.0;

  static ModelDims from_config(const TrainConfig& cfg, std::size_t input_dim);
  bool operator==(const ModelDims&) const = default;
};

// Width of one channel's feature vector for a variant.
std::size_t channel_width(Variant v);
std::size_t head_input_width(Variant v);
bool uses_graph(Variant v);

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

/// One SAH channel. Tensors a variant does not use stay undefined.
template <typename T>
struct ChannelParams {
  // projection: z = W2 GELU(LN(W1 a + b1)) + b2
  Tensor<T> w1, b1, ln_gain, ln_bias, w2, b2;
  // curvature field
  Tensor<T> wg1, bg1, wg2, bg2;
  Tensor<T> gamma_raw;  // [1], isotropic variant only
  // sectors
  Tensor<T> prototypes, log_tau;
  // Euclidean readout replacing the polar features (no-hyperbolic variant)
  Tensor<T> readout_w, readout_b;
  // running statistics for the standardized r and H features
  Tensor<T> bn_r_mean, bn_r_var, bn_h_mean, bn_h_var;
};

template <typename T>
struct SageParams {
  Tensor<T> ws1, wn1, ln1_gain, ln1_bias;
  Tensor<T> ws2, wn2, ln2_gain, ln2_bias;
};

template <typename T>
struct HeadParams {
  Tensor<T> w1, b1, w2, b2;
};

template <typename T>
struct SahgParams {
  ModelDims dims;
  Variant variant = Variant::Full;
  ChannelParams<T> node;
  ChannelParams<T> graph;  // empty for the no-graph variant
  SageParams<T> sage;
  HeadParams<T> head;

  // Trainable tensors in a fixed order, then the running statistics.
  std::vector<NamedTensor<T>> parameters() const;
  std::vector<NamedTensor<T>> buffers() const;
  std::vector<NamedTensor<T>> all() const;

  SahgParams clone() const;
  // Copies values (not gradients) from a structurally identical set.
  void assign(const SahgParams& other);
};

// Zero-filled parameter skeleton with the right shapes for dims/variant.
template <typename T>
SahgParams<T> make_params(const ModelDims& dims, Variant variant);

/// Seeded initialization: fan-in uniform weights, zero biases, unit LN gains,
/// warp-net output layer drawn from N(0, 1e-3^2), Gaussian prototypes
/// normalized to the unit sphere, log temperature ln(tau_init).
template <typename T>
SahgParams<T> init_params(const TrainConfig& cfg, std::size_t input_dim, std::uint64_t seed);

// Converts between precisions (used to run f32 checkpoints in f64 and back).
template <typename To, typename From>
SahgParams<To> cast_params(const SahgParams<From>& p);

}  // namespace sahg::model
