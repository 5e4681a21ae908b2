#pragma once

#include <cstddef>
#include <vector>

#include "sahg/autodiff/ops.hpp"
#include "sahg/graph/sparse_graph.hpp"
#include "sahg/model/params.hpp"
#include "sahg/rng.hpp"

namespace sahg::model {

using ad::Tape;

/// Per-call state threaded through the forward pass. `dropout_rng` may be
/// null when not training.
template <typename T>
struct Context {
  Tape<T>& tape;
  bool training = false;
  T dropout = T(0);
  Rng* dropout_rng = nullptr;
};

template <typename T>
struct SectorAssignment {
  Tensor<T> logits;  // tau_k * gamma * phi
  Tensor<T> q;
  Tensor<T> phi;
};

// Intermediate quantities of one channel; entries a variant does not compute
// stay undefined.
template <typename T>
struct ChannelOutput {
  Tensor<T> features;  // Phi, [B x width]
  Tensor<T> z;
  Tensor<T> r;
  Tensor<T> u;
  Tensor<T> gamma;
  Tensor<T> phi;
  Tensor<T> q;
  Tensor<T> entropy;
  Tensor<T> alignment;
};

template <typename T>
struct ForwardOutput {
  Tensor<T> probs;  // [B]
  Tensor<T> fused;  // head input
  ChannelOutput<T> node;
  ChannelOutput<T> graph;
};

template <typename T>
Tensor<T> project(Context<T>& ctx, const Tensor<T>& a, const ChannelParams<T>& ch);

template <typename T>
Tensor<T> local_warp(Tape<T>& tape, const Tensor<T>& u, const ChannelParams<T>& ch);

template <typename T>
SectorAssignment<T> sector_assign(Tape<T>& tape, const Tensor<T>& u, const Tensor<T>& gamma,
                                  const ChannelParams<T>& ch);

template <typename T>
ChannelOutput<T> channel_features(Context<T>& ctx, const Tensor<T>& a, ChannelParams<T>& ch, Variant variant);

// Two mean-aggregation layers over the whole graph: [N x D] -> [N x d_h].
template <typename T>
Tensor<T> sage_forward(Context<T>& ctx, const Tensor<T>& X, const graph::SparseGraph& g,
                       const SageParams<T>& sage);

// Probabilities for the rows in `batch`. `g` may be null for the no-graph
// variant and is ignored by it.
template <typename T>
ForwardOutput<T> forward(Context<T>& ctx, const Tensor<T>& X, const graph::SparseGraph* g, SahgParams<T>& params,
                         const std::vector<std::size_t>& batch);

// Eval-mode probabilities (no tape) as doubles.
template <typename T>
std::vector<double> predict(const Tensor<T>& X, const graph::SparseGraph* g, SahgParams<T>& params,
                            const std::vector<std::size_t>& rows);

template <typename T>
Tensor<T> features_tensor(const std::vector<float>& values, std::size_t n, std::size_t d);

}  // namespace sahg::model
