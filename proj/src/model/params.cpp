#include "sahg/model/params.hpp"

#include <cmath>

#include "sahg/error.hpp"
#include "sahg/rng.hpp"

namespace sahg::model {

ModelDims ModelDims::from_config(const TrainConfig& cfg, std::size_t input_dim) {
  ModelDims d;
  d.input_dim = input_dim;
  d.hidden_dim = cfg.hidden_dim;
  d.projection_dim = cfg.projection_dim;
  d.num_prototypes = cfg.num_prototypes;
  d.warp_hidden_dim = cfg.warp_hidden_dim;
  d.temperature_init = cfg.temperature_init;
  return d;
}

std::size_t channel_width(Variant v) { return v == Variant::NoSector ? 2 : 5; }

bool uses_graph(Variant v) { return v != Variant::NoGraph; }

std::size_t head_input_width(Variant v) { return channel_width(v) * (uses_graph(v) ? 2 : 1); }

namespace {

template <typename T>
void push(std::vector<NamedTensor<T>>& out, const std::string& name, const Tensor<T>& t) {
  if (t.defined()) out.push_back({name, t});
}

template <typename T>
void channel_parameters(std::vector<NamedTensor<T>>& out, const std::string& p, const ChannelParams<T>& c) {
  push(out, p + ".w1", c.w1);
  push(out, p + ".b1", c.b1);
  push(out, p + ".ln_gain", c.ln_gain);
  push(out, p + ".ln_bias", c.ln_bias);
  push(out, p + ".w2", c.w2);
  push(out, p + ".b2", c.b2);
  push(out, p + ".wg1", c.wg1);
  push(out, p + ".bg1", c.bg1);
  push(out, p + ".wg2", c.wg2);
  push(out, p + ".bg2", c.bg2);
  push(out, p + ".gamma_raw", c.gamma_raw);
  push(out, p + ".prototypes", c.prototypes);
  push(out, p + ".log_tau", c.log_tau);
  push(out, p + ".readout_w", c.readout_w);
  push(out, p + ".readout_b", c.readout_b);
}

template <typename T>
void channel_buffers(std::vector<NamedTensor<T>>& out, const std::string& p, const ChannelParams<T>& c) {
  push(out, p + ".bn_r_mean", c.bn_r_mean);
  push(out, p + ".bn_r_var", c.bn_r_var);
  push(out, p + ".bn_h_mean", c.bn_h_mean);
  push(out, p + ".bn_h_var", c.bn_h_var);
}

template <typename T>
Tensor<T> param(ad::Shape s) {
  return Tensor<T>::zeros(std::move(s), true);
}

template <typename T>
Tensor<T> buffer(T fill) {
  return Tensor<T>::full({1}, fill);
}

template <typename T>
ChannelParams<T> make_channel(const ModelDims& d, Variant v) {
  ChannelParams<T> c;
  c.w1 = param<T>({d.hidden_dim, d.input_dim});
  c.b1 = param<T>({d.hidden_dim});
  c.ln_gain = Tensor<T>::full({d.hidden_dim}, T(1), true);
  c.ln_bias = param<T>({d.hidden_dim});
  c.w2 = param<T>({d.projection_dim, d.hidden_dim});
  c.b2 = param<T>({d.projection_dim});
  if (v == Variant::NoHyperbolic) {
    c.readout_w = param<T>({5, d.projection_dim});
    c.readout_b = param<T>({5});
    return c;
  }
  if (v == Variant::IsotropicGamma) {
    c.gamma_raw = param<T>({1});
  } else {
    c.wg1 = param<T>({d.warp_hidden_dim, d.projection_dim});
    c.bg1 = param<T>({d.warp_hidden_dim});
    c.wg2 = param<T>({1, d.warp_hidden_dim});
    c.bg2 = param<T>({1});
  }
  if (v != Variant::NoSector) {
    c.prototypes = param<T>({d.num_prototypes, d.projection_dim});
    c.log_tau = Tensor<T>::full({d.num_prototypes}, static_cast<T>(std::log(d.temperature_init)), true);
    c.bn_h_mean = buffer<T>(0);
    c.bn_h_var = buffer<T>(1);
  }
  c.bn_r_mean = buffer<T>(0);
  c.bn_r_var = buffer<T>(1);
  return c;
}

template <typename T>
void fill_uniform(Tensor<T>& t, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : t.values()) v = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
void init_channel(ChannelParams<T>& c, const ModelDims& d, Rng& rng) {
  fill_uniform(c.w1, d.input_dim, rng);
  fill_uniform(c.w2, d.hidden_dim, rng);
  if (c.readout_w.defined()) fill_uniform(c.readout_w, d.projection_dim, rng);
  if (c.wg1.defined()) {
    fill_uniform(c.wg1, d.projection_dim, rng);
    for (auto& v : c.wg2.values()) v = static_cast<T>(rng.normal(0.0, 1e-3));
  }
  if (c.prototypes.defined()) {
    const std::size_t dp = d.projection_dim;
    for (std::size_t k = 0; k < d.num_prototypes; ++k) {
      std::vector<double> g(dp);
      double ss = 0.0;
      for (auto& v : g) {
        v = rng.normal(0.0, 1.0);
        ss += v * v;
      }
      const double inv = 1.0 / std::sqrt(ss);
      for (std::size_t j = 0; j < dp; ++j) c.prototypes.at(k, j) = static_cast<T>(g[j] * inv);
    }
  }
}

template <typename T>
void copy_values(const Tensor<T>& dst, const Tensor<T>& src) {
  auto* d = dst.storage();
  auto* s = src.storage();
  if (d->value.size() != s->value.size()) throw DimensionError("parameter shape mismatch during copy");
  d->value = s->value;
}

}  // namespace

template <typename T>
std::vector<NamedTensor<T>> SahgParams<T>::parameters() const {
  std::vector<NamedTensor<T>> out;
  channel_parameters(out, "node", node);
  if (uses_graph(variant)) {
    channel_parameters(out, "graph", graph);
    push(out, "sage.ws1", sage.ws1);
    push(out, "sage.wn1", sage.wn1);
    push(out, "sage.ln1_gain", sage.ln1_gain);
    push(out, "sage.ln1_bias", sage.ln1_bias);
    push(out, "sage.ws2", sage.ws2);
    push(out, "sage.wn2", sage.wn2);
    push(out, "sage.ln2_gain", sage.ln2_gain);
    push(out, "sage.ln2_bias", sage.ln2_bias);
  }
  push(out, "head.w1", head.w1);
  push(out, "head.b1", head.b1);
  push(out, "head.w2", head.w2);
  push(out, "head.b2", head.b2);
  return out;
}

template <typename T>
std::vector<NamedTensor<T>> SahgParams<T>::buffers() const {
  std::vector<NamedTensor<T>> out;
  channel_buffers(out, "node", node);
  if (uses_graph(variant)) channel_buffers(out, "graph", graph);
  return out;
}

template <typename T>
std::vector<NamedTensor<T>> SahgParams<T>::all() const {
  auto out = parameters();
  auto b = buffers();
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

template <typename T>
SahgParams<T> SahgParams<T>::clone() const {
  auto out = make_params<T>(dims, variant);
  out.assign(*this);
  return out;
}

template <typename T>
void SahgParams<T>::assign(const SahgParams& other) {
  auto dst = all();
  auto src = other.all();
  if (dst.size() != src.size()) throw DimensionError("parameter sets differ in structure");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i].name != src[i].name) throw DimensionError("parameter sets differ at " + dst[i].name);
    copy_values(dst[i].tensor, src[i].tensor);
  }
}

template <typename T>
SahgParams<T> make_params(const ModelDims& d, Variant v) {
  if (d.input_dim == 0) throw ParameterError("input dimension must be >= 1");
  SahgParams<T> p;
  p.dims = d;
  p.variant = v;
  p.node = make_channel<T>(d, v);
  if (uses_graph(v)) {
    p.graph = make_channel<T>(d, v);
    // The graph channel reads the sage output, whose width is d_h.
    p.graph.w1 = param<T>({d.hidden_dim, d.hidden_dim});
    p.sage.ws1 = param<T>({d.hidden_dim, d.input_dim});
    p.sage.wn1 = param<T>({d.hidden_dim, d.input_dim});
    p.sage.ln1_gain = Tensor<T>::full({d.hidden_dim}, T(1), true);
    p.sage.ln1_bias = param<T>({d.hidden_dim});
    p.sage.ws2 = param<T>({d.hidden_dim, d.hidden_dim});
    p.sage.wn2 = param<T>({d.hidden_dim, d.hidden_dim});
    p.sage.ln2_gain = Tensor<T>::full({d.hidden_dim}, T(1), true);
    p.sage.ln2_bias = param<T>({d.hidden_dim});
  }
  p.head.w1 = param<T>({kHeadHidden, head_input_width(v)});
  p.head.b1 = param<T>({kHeadHidden});
  p.head.w2 = param<T>({1, kHeadHidden});
  p.head.b2 = param<T>({1});
  return p;
}

template <typename T>
SahgParams<T> init_params(const TrainConfig& cfg, std::size_t input_dim, std::uint64_t seed) {
  cfg.validate();
  const auto dims = ModelDims::from_config(cfg, input_dim);
  auto p = make_params<T>(dims, cfg.variant);
  Rng rng(seed, "init");
  init_channel(p.node, dims, rng);
  if (uses_graph(cfg.variant)) {
    ModelDims gd = dims;
    gd.input_dim = dims.hidden_dim;
    init_channel(p.graph, gd, rng);
    fill_uniform(p.sage.ws1, dims.input_dim, rng);
    fill_uniform(p.sage.wn1, dims.input_dim, rng);
    fill_uniform(p.sage.ws2, dims.hidden_dim, rng);
    fill_uniform(p.sage.wn2, dims.hidden_dim, rng);
  }
  fill_uniform(p.head.w1, head_input_width(cfg.variant), rng);
  fill_uniform(p.head.w2, kHeadHidden, rng);
  return p;
}

template <typename To, typename From>
SahgParams<To> cast_params(const SahgParams<From>& p) {
  auto out = make_params<To>(p.dims, p.variant);
  auto dst = out.all();
  auto src = p.all();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto& dv = dst[i].tensor.values();
    const auto& sv = src[i].tensor.values();
    for (std::size_t j = 0; j < dv.size(); ++j) dv[j] = static_cast<To>(sv[j]);
  }
  return out;
}

template struct SahgParams<float>;
template struct SahgParams<double>;
template SahgParams<float> make_params<float>(const ModelDims&, Variant);
template SahgParams<double> make_params<double>(const ModelDims&, Variant);
template SahgParams<float> init_params<float>(const TrainConfig&, std::size_t, std::uint64_t);
template SahgParams<double> init_params<double>(const TrainConfig&, std::size_t, std::uint64_t);
template SahgParams<float> cast_params<float, double>(const SahgParams<double>&);
template SahgParams<double> cast_params<double, float>(const SahgParams<float>&);
template SahgParams<float> cast_params<float, float>(const SahgParams<float>&);
template SahgParams<double> cast_params<double, double>(const SahgParams<double>&);

}  // namespace sahg::model
