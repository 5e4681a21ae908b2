#include "sahg/model/sahg_model.hpp"

#include <cmath>
#include <numeric>

#include "sahg/error.hpp"

namespace sahg::model {

namespace ad_ = sahg::ad;

namespace {

template <typename T>
Tensor<T> maybe_dropout(Context<T>& ctx, const Tensor<T>& x) {
  if (!ctx.training || ctx.dropout <= T(0)) return x;
  if (ctx.dropout_rng == nullptr) throw ParameterError("training with dropout needs an rng");
  return ad_::dropout(ctx.tape, x, ctx.dropout, *ctx.dropout_rng);
}

template <typename T>
Tensor<T> sage_layer(Context<T>& ctx, const Tensor<T>& x, const graph::SparseGraph& g, const Tensor<T>& ws,
                     const Tensor<T>& wn, const Tensor<T>& gain, const Tensor<T>& bias) {
  auto& t = ctx.tape;
  auto agg = ad_::sparse_mean_aggregate(t, x, g.view());
  auto pre = ad_::add(t, ad_::linear(t, x, ws), ad_::linear(t, agg, wn));
  return maybe_dropout(ctx, ad_::gelu(t, ad_::layer_norm(t, pre, gain, bias)));
}

}  // namespace

template <typename T>
Tensor<T> project(Context<T>& ctx, const Tensor<T>& a, const ChannelParams<T>& ch) {
  if (a.rank() != 2 || a.cols() != ch.w1.cols()) {
    throw DimensionError("project: input " + ad::shape_str(a.shape()) + " does not match channel width " +
                         std::to_string(ch.w1.cols()));
  }
  auto& t = ctx.tape;
  auto h = ad_::gelu(t, ad_::layer_norm(t, ad_::affine(t, a, ch.w1, ch.b1), ch.ln_gain, ch.ln_bias));
  h = maybe_dropout(ctx, h);
  return ad_::affine(t, h, ch.w2, ch.b2);
}

template <typename T>
Tensor<T> local_warp(Tape<T>& t, const Tensor<T>& u, const ChannelParams<T>& ch) {
  const std::size_t B = u.rows();
  if (ch.gamma_raw.defined()) {
    // Isotropic field: one learnable scalar shared by every direction.
    auto g = ad_::shift(t, ad_::softplus(t, ch.gamma_raw), static_cast<T>(kGammaFloor));
    return ad_::add(t, Tensor<T>::zeros({B}), g);
  }
  auto h = ad_::gelu(t, ad_::affine(t, u, ch.wg1, ch.bg1));
  auto s = ad_::reshape(t, ad_::affine(t, h, ch.wg2, ch.bg2), {B});
  return ad_::shift(t, ad_::softplus(t, s), static_cast<T>(kGammaFloor));
}

template <typename T>
SectorAssignment<T> sector_assign(Tape<T>& t, const Tensor<T>& u, const Tensor<T>& gamma,
                                  const ChannelParams<T>& ch) {
  const std::size_t B = u.rows();
  auto pbar = ad_::normalize_rows(t, ch.prototypes, static_cast<T>(kEps), ad_::NormalizeMode::AddEps);
  SectorAssignment<T> out;
  out.phi = ad_::linear(t, u, pbar);  // [B x K]
  auto tau = ad_::exp(t, ch.log_tau);
  auto scaled = ad_::mul(t, out.phi, tau);
  out.logits = ad_::mul(t, scaled, ad_::reshape(t, gamma, {B, 1}));
  out.q = ad_::softmax_rows(t, out.logits);
  return out;
}

template <typename T>
ChannelOutput<T> channel_features(Context<T>& ctx, const Tensor<T>& a, ChannelParams<T>& ch, Variant variant) {
  auto& t = ctx.tape;
  ChannelOutput<T> out;
  out.z = project(ctx, a, ch);
  if (variant == Variant::NoHyperbolic) {
    out.features = ad_::affine(t, out.z, ch.readout_w, ch.readout_b);
    return out;
  }
  const T eps = static_cast<T>(kEps);
  out.r = ad_::norm2_rows(t, out.z);
  out.u = ad_::normalize_rows(t, out.z, eps, ad_::NormalizeMode::MaxEps);
  out.gamma = local_warp(t, out.u, ch);
  auto r_std = ad_::batch_norm(t, out.r, ch.bn_r_mean, ch.bn_r_var, ctx.training);
  if (variant == Variant::NoSector) {
    out.features = ad_::concat_cols(t, {r_std, ad_::mul(t, out.gamma, r_std)});
    return out;
  }
  auto sa = sector_assign(t, out.u, out.gamma, ch);
  out.phi = sa.phi;
  out.q = sa.q;
  out.entropy = ad_::entropy_from_logits(t, sa.logits);
  out.alignment = ad_::max_rows(t, sa.phi).value;
  auto h_std = ad_::batch_norm(t, out.entropy, ch.bn_h_mean, ch.bn_h_var, ctx.training);
  const auto& A = out.alignment;
  out.features = ad_::concat_cols(t, {r_std, h_std, A, ad_::mul(t, r_std, A), ad_::mul(t, out.gamma, A)});
  return out;
}

template <typename T>
Tensor<T> sage_forward(Context<T>& ctx, const Tensor<T>& X, const graph::SparseGraph& g,
                       const SageParams<T>& sage) {
  if (X.rows() != g.num_nodes()) {
    throw DimensionError("sage_forward: " + std::to_string(X.rows()) + " feature rows for a graph of " +
                         std::to_string(g.num_nodes()) + " nodes");
  }
  auto h1 = sage_layer(ctx, X, g, sage.ws1, sage.wn1, sage.ln1_gain, sage.ln1_bias);
  return sage_layer(ctx, h1, g, sage.ws2, sage.wn2, sage.ln2_gain, sage.ln2_bias);
}

template <typename T>
ForwardOutput<T> forward(Context<T>& ctx, const Tensor<T>& X, const graph::SparseGraph* g, SahgParams<T>& params,
                         const std::vector<std::size_t>& batch) {
  auto& t = ctx.tape;
  const Variant v = params.variant;
  for (auto i : batch) {
    if (i >= X.rows()) throw DimensionError("forward: batch index " + std::to_string(i) + " out of range");
  }
  ForwardOutput<T> out;
  auto xb = ad_::gather_rows(t, X, batch);
  out.node = channel_features(ctx, xb, params.node, v);
  if (uses_graph(v)) {
    if (g == nullptr) throw ParameterError("forward: variant " + std::string(to_string(v)) + " needs a graph");
    auto xbar = sage_forward(ctx, X, *g, params.sage);
    out.graph = channel_features(ctx, ad_::gather_rows(t, xbar, batch), params.graph, v);
    out.fused = ad_::concat_cols(t, {out.node.features, out.graph.features});
  } else {
    out.fused = out.node.features;
  }
  auto h = maybe_dropout(ctx, ad_::gelu(t, ad_::affine(t, out.fused, params.head.w1, params.head.b1)));
  auto logit = ad_::reshape(t, ad_::affine(t, h, params.head.w2, params.head.b2), {batch.size()});
  out.probs = ad_::sigmoid(t, logit);
  return out;
}

template <typename T>
std::vector<double> predict(const Tensor<T>& X, const graph::SparseGraph* g, SahgParams<T>& params,
                            const std::vector<std::size_t>& rows) {
  Tape<T> tape;
  tape.set_enabled(false);
  Context<T> ctx{tape};
  auto out = forward(ctx, X, g, params, rows);
  return {out.probs.values().begin(), out.probs.values().end()};
}

template <typename T>
Tensor<T> features_tensor(const std::vector<float>& values, std::size_t n, std::size_t d) {
  if (values.size() != n * d) throw DimensionError("feature buffer size does not match n x d");
  return Tensor<T>::from({n, d}, std::vector<T>(values.begin(), values.end()));
}

#define SAHG_MODEL_INSTANTIATE(T)                                                                           \
  template Tensor<T> project<T>(Context<T>&, const Tensor<T>&, const ChannelParams<T>&);                  \
  template Tensor<T> local_warp<T>(Tape<T>&, const Tensor<T>&, const ChannelParams<T>&);                  \
  template SectorAssignment<T> sector_assign<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&,            \
                                                const ChannelParams<T>&);                                 \
  template ChannelOutput<T> channel_features<T>(Context<T>&, const Tensor<T>&, ChannelParams<T>&, Variant); \
  template Tensor<T> sage_forward<T>(Context<T>&, const Tensor<T>&, const graph::SparseGraph&,             \
                                     const SageParams<T>&);                                                \
  template ForwardOutput<T> forward<T>(Context<T>&, const Tensor<T>&, const graph::SparseGraph*,           \
                                       SahgParams<T>&, const std::vector<std::size_t>&);                   \
  template std::vector<double> predict<T>(const Tensor<T>&, const graph::SparseGraph*, SahgParams<T>&,     \
                                          const std::vector<std::size_t>&);                                \
  template Tensor<T> features_tensor<T>(const std::vector<float>&, std::size_t, std::size_t);

SAHG_MODEL_INSTANTIATE(float)
SAHG_MODEL_INSTANTIATE(double)

}  // namespace sahg::model
