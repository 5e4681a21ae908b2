#include "sahg/analysis/dumps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "sahg/analysis/synth.hpp"
#include "sahg/error.hpp"
#include "sahg/graph/construct.hpp"
#include "sahg/train/losses.hpp"

namespace sahg::analysis {

namespace fs = std::filesystem;
using ad::Tensor;

namespace {

std::ofstream open_csv(const fs::path& out) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary);
  if (!f) throw FormatError("cannot write " + out.string());
  return f;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char b[32];
  std::snprintf(b, sizeof b, "%.9g", v);
  return b;
}

double at_or_nan(const Tensor<float>& t, std::size_t i) {
  return t.defined() ? static_cast<double>(t[i]) : std::nan("");
}

std::vector<std::string> feature_names(Variant v) {
  if (v == Variant::NoSector) return {"r_std", "gamma_r"};
  if (v == Variant::NoHyperbolic) return {"e0", "e1", "e2", "e3", "e4"};
  return {"r_std", "h_std", "A", "rA", "gammaA"};
}

}  // namespace

model::ForwardOutput<float> forward_all(model::SahgParams<float>& params, const graph::Dataset& ds,
                                        const graph::SparseGraph* g) {
  if (params.dims.input_dim != ds.d) {
    throw ParameterError("checkpoint expects " + std::to_string(params.dims.input_dim) +
                         " features, dataset has " + std::to_string(ds.d));
  }
  ad::Tape<float> tape;
  tape.set_enabled(false);
  model::Context<float> ctx{tape};
  std::vector<std::size_t> rows(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) rows[i] = i;
  const auto X = model::features_tensor<float>(ds.features, ds.n, ds.d);
  return model::forward(ctx, X, g, params, rows);
}

std::vector<std::pair<double, double>> poincare_disk(const Tensor<float>& u, const Tensor<float>& r) {
  const std::size_t n = u.rows(), d = u.cols();
  std::vector<double> var(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += u.at(i, j);
    m /= static_cast<double>(std::max<std::size_t>(n, 1));
    for (std::size_t i = 0; i < n; ++i) var[j] += (u.at(i, j) - m) * (u.at(i, j) - m);
  }
  std::vector<std::size_t> idx(d);
  for (std::size_t j = 0; j < d; ++j) idx[j] = j;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });
  const std::size_t a = idx[0], b = d > 1 ? idx[1] : idx[0];
  std::vector<std::pair<double, double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u.at(i, a), y = u.at(i, b);
    const double norm = std::hypot(x, y);
    if (norm == 0.0) continue;
    const double rad = std::tanh(0.5 * static_cast<double>(r[i]));
    out[i] = {rad * x / norm, rad * y / norm};
  }
  return out;
}

void dump_curvature_field(model::SahgParams<float>& params, const graph::Dataset& ds, const graph::SparseGraph* g,
                          Channel channel, const fs::path& out) {
  if (channel == Channel::Graph && !model::uses_graph(params.variant)) {
    throw ParameterError("variant no-graph has no graph channel");
  }
  if (params.variant == Variant::NoHyperbolic) throw ParameterError("variant no-hyperbolic has no curvature field");
  auto fw = forward_all(params, ds, g);
  const auto& ch = channel == Channel::Node ? fw.node : fw.graph;
  const auto disk = poincare_disk(ch.u, ch.r);
  auto f = open_csv(out);
  f << "node,label,r,gamma,H,A,disk_x,disk_y\n";
  for (std::size_t i = 0; i < ds.n; ++i) {
    f << i << ',' << int(ds.labels[i]) << ',' << num(ch.r[i]) << ',' << num(ch.gamma[i]) << ','
      << num(at_or_nan(ch.entropy, i)) << ',' << num(at_or_nan(ch.alignment, i)) << ',' << num(disk[i].first)
      << ',' << num(disk[i].second) << '\n';
  }
}

void dump_feature_distributions(model::SahgParams<float>& params, const graph::Dataset& ds,
                                const graph::SparseGraph* g, const fs::path& out) {
  auto fw = forward_all(params, ds, g);
  std::vector<std::pair<std::string, const model::ChannelOutput<float>*>> channels{{"node", &fw.node}};
  if (model::uses_graph(params.variant)) channels.push_back({"graph", &fw.graph});
  const auto names = feature_names(params.variant);
  auto f = open_csv(out);
  f << "node,label";
  for (const auto& [prefix, _] : channels) {
    for (const auto& n : names) f << ',' << prefix << '_' << n;
    f << ',' << prefix << "_r," << prefix << "_H," << prefix << "_A," << prefix << "_gamma";
  }
  f << '\n';
  for (std::size_t i = 0; i < ds.n; ++i) {
    f << i << ',' << int(ds.labels[i]);
    for (const auto& [_, ch] : channels) {
      for (std::size_t c = 0; c < names.size(); ++c) f << ',' << num(ch->features.at(i, c));
      f << ',' << num(at_or_nan(ch->r, i)) << ',' << num(at_or_nan(ch->entropy, i)) << ','
        << num(at_or_nan(ch->alignment, i)) << ',' << num(at_or_nan(ch->gamma, i));
    }
    f << '\n';
  }
}

void export_embeddings(model::SahgParams<float>& params, const graph::Dataset& ds, const graph::SparseGraph* g,
                       const fs::path& out) {
  auto fw = forward_all(params, ds, g);
  const std::size_t w = fw.fused.cols();
  auto f = open_csv(out);
  f << "label";
  for (std::size_t c = 0; c < w; ++c) f << ",f" << c;
  f << '\n';
  for (std::size_t i = 0; i < ds.n; ++i) {
    f << int(ds.labels[i]);
    for (std::size_t c = 0; c < w; ++c) f << ',' << num(fw.fused.at(i, c));
    f << '\n';
  }
}

std::vector<ComplexityRow> complexity_smoke(const std::vector<std::size_t>& n_values, std::size_t k, std::size_t dim,
                                            std::size_t hidden_dim, std::size_t projection_dim,
                                            std::size_t repetitions) {
  if (repetitions == 0) throw ParameterError("need at least one repetition");
  std::vector<ComplexityRow> rows;
  for (auto n : n_values) {
    SynthConfig sc;
    sc.n = n;
    sc.dim = dim;
    const auto ds = generate_synthetic(sc);
    const auto g = graph::build_knn_graph(ds.features, ds.n, ds.d, k);
    TrainConfig cfg;
    cfg.hidden_dim = hidden_dim;
    cfg.projection_dim = projection_dim;
    auto params = model::init_params<float>(cfg, dim, 0);
    const auto X = model::features_tensor<float>(ds.features, ds.n, ds.d);
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;

    std::vector<double> times;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      ad::Tape<float> tape;
      model::Context<float> ctx{tape, true};
      auto fw = model::forward(ctx, X, &g, params, all);
      auto loss = train::focal_loss(tape, fw.probs, ds.labels, cfg.focal_alpha, cfg.focal_gamma);
      tape.backward(loss);
      times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      for (auto& p : params.parameters()) p.tensor.drop_grad();
    }
    std::sort(times.begin(), times.end());
    ComplexityRow row;
    row.n = n;
    row.edges = g.num_edges();
    row.seconds = times[times.size() / 2];
    row.ratio = rows.empty() ? 0.0 : row.seconds / rows.back().seconds;
    rows.push_back(row);
  }
  return rows;
}

void write_complexity_csv(const fs::path& out, const std::vector<ComplexityRow>& rows) {
  auto f = open_csv(out);
  f << "n,edges,seconds,ratio\n";
  for (const auto& r : rows) f << r.n << ',' << r.edges << ',' << num(r.seconds) << ',' << num(r.ratio) << '\n';
}

}  // namespace sahg::analysis
